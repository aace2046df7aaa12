//! Non-uniform cellular automata: a separate ternary transition function at
//! every vertex of the time-space diagram, over a fixed state alphabet.

use super::State;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Where the per-vertex tables come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexSource {
    /// Deterministic generator: the table for vertex `(cell c, time τ)` is
    /// filled in index order with `next_u64() % σ` drawn from
    /// `ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(seed ^ c) ^ τ))`.
    Seeded { seed: u64 },
    /// Explicit tables keyed by `(time, cell)`.
    Explicit(BTreeMap<(u32, i64), Vec<State>>),
    /// Every vertex applies the same table: a uniform automaton viewed as a
    /// circuit.
    Uniform(Vec<State>),
}

/// A triangle circuit: input length `n`, height `t`, state alphabet of size
/// `sigma`, a designated neutral state for cells outside the input, and one
/// transition table per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCircuit {
    n: u32,
    t: u32,
    sigma: u16,
    neutral: State,
    source: VertexSource,
}

impl TriangleCircuit {
    pub fn new(n: u32, t: u32, sigma: u16, neutral: State, source: VertexSource) -> Result<Self> {
        if n == 0 {
            return Err(Error::CircuitShape("input length must be positive".into()));
        }
        if !(2..=256).contains(&sigma) {
            return Err(Error::CircuitShape(format!("sigma = {sigma} out of range 2..=256")));
        }
        if neutral as u16 >= sigma {
            return Err(Error::CircuitShape(format!("neutral state {neutral} out of range")));
        }
        let want = (sigma as usize).pow(3);
        let check = |name: &str, table: &[State]| -> Result<()> {
            if table.len() != want {
                return Err(Error::CircuitShape(format!(
                    "vertex {name} table has {} entries, want {want}",
                    table.len()
                )));
            }
            if table.iter().any(|&s| s as u16 >= sigma) {
                return Err(Error::CircuitShape(format!("vertex {name} table has out-of-range states")));
            }
            Ok(())
        };
        match &source {
            VertexSource::Explicit(map) => {
                for (&(tau, cell), table) in map {
                    check(&format!("({tau}, {cell})"), table)?;
                }
            }
            VertexSource::Uniform(table) => check("(uniform)", table)?,
            VertexSource::Seeded { .. } => {}
        }
        Ok(TriangleCircuit { n, t, sigma, neutral, source })
    }

    pub fn seeded(n: u32, t: u32, sigma: u16, neutral: State, seed: u64) -> Result<Self> {
        TriangleCircuit::new(n, t, sigma, neutral, VertexSource::Seeded { seed })
    }

    /// Views a uniform rule as a circuit of the given shape.
    pub fn uniform(n: u32, t: u32, rule: &super::CARule) -> Result<Self> {
        TriangleCircuit::new(
            n,
            t,
            rule.states(),
            rule.neutral(),
            VertexSource::Uniform(rule.delta().to_vec()),
        )
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn height(&self) -> u32 {
        self.t
    }

    pub fn sigma(&self) -> u16 {
        self.sigma
    }

    pub fn neutral(&self) -> State {
        self.neutral
    }

    /// The designated output cell `⌊(n-1)/2⌋`.
    pub fn output_cell(&self) -> i64 {
        ((self.n - 1) / 2) as i64
    }

    /// Transition table of one vertex; generated on demand for seeded
    /// circuits, borrowed otherwise.
    pub fn vertex_table(&self, cell: i64, tau: u32) -> Result<std::borrow::Cow<'_, [State]>> {
        use std::borrow::Cow;
        match &self.source {
            VertexSource::Seeded { seed } => {
                use rand_core::{RngCore, SeedableRng};
                let vertex_seed = splitmix64(splitmix64(seed ^ cell as u64) ^ tau as u64);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(vertex_seed);
                Ok(Cow::Owned(
                    (0..(self.sigma as usize).pow(3))
                        .map(|_| (rng.next_u64() % self.sigma as u64) as State)
                        .collect(),
                ))
            }
            VertexSource::Explicit(map) => map
                .get(&(tau, cell))
                .map(|t| Cow::Borrowed(t.as_slice()))
                .ok_or_else(|| Error::CircuitShape(format!("no vertex table at ({tau}, {cell})"))),
            VertexSource::Uniform(table) => Ok(Cow::Borrowed(table.as_slice())),
        }
    }

    fn encode_input(&self, input: &[u8]) -> Result<Vec<State>> {
        if input.len() != self.n as usize {
            return Err(Error::CircuitShape(format!(
                "input has {} bits, circuit expects {}",
                input.len(),
                self.n
            )));
        }
        input
            .iter()
            .map(|&b| match b {
                0 => Ok(0),
                1 => Ok(1),
                other => Err(Error::CircuitShape(format!("input bit {other} is not 0/1"))),
            })
            .collect()
    }

    /// Row of states at the given time, restricted to the cells that can
    /// still influence the output: `[c* - (t - tau), c* + (t - tau)]`.
    pub fn row_at(&self, input: &[u8], tau: u32) -> Result<Vec<State>> {
        if tau > self.t {
            return Err(Error::CircuitShape(format!("time {tau} exceeds height {}", self.t)));
        }
        let states = self.encode_input(input)?;
        let c_star = self.output_cell();
        let span = |tt: u32| -> (i64, i64) {
            let radius = (self.t - tt) as i64;
            (c_star - radius, c_star + radius)
        };
        let (lo0, hi0) = span(0);
        let mut row: Vec<State> = (lo0..=hi0)
            .map(|c| {
                if c >= 0 && (c as usize) < states.len() {
                    states[c as usize]
                } else {
                    self.neutral
                }
            })
            .collect();
        let mut lo = lo0;
        for tt in 1..=tau {
            let (nlo, nhi) = span(tt);
            let mut next = Vec::with_capacity((nhi - nlo + 1) as usize);
            for c in nlo..=nhi {
                let table = self.vertex_table(c, tt)?;
                let idx = (c - lo) as usize;
                let l = row[idx - 1] as usize;
                let m = row[idx] as usize;
                let r = row[idx + 1] as usize;
                next.push(table[(l * self.sigma as usize + m) * self.sigma as usize + r]);
            }
            row = next;
            lo = nlo;
        }
        Ok(row)
    }
}

/// Evaluates the circuit on an input bit string and returns the state at the
/// output vertex `(⌊(n-1)/2⌋, t)`.
pub fn triangle_run(circuit: &TriangleCircuit, input: &[u8]) -> Result<State> {
    let row = circuit.row_at(input, circuit.height())?;
    debug_assert_eq!(row.len(), 1);
    Ok(row[0])
}

/// Independent evaluator used as a test oracle: memoized top-down recursion
/// instead of the row sweep.
pub fn triangle_run_oracle(circuit: &TriangleCircuit, input: &[u8]) -> Result<State> {
    use std::collections::HashMap;

    fn state_at(
        circuit: &TriangleCircuit,
        input: &[State],
        memo: &mut HashMap<(i64, u32), State>,
        cell: i64,
        tau: u32,
    ) -> Result<State> {
        if tau == 0 {
            return Ok(if cell >= 0 && (cell as usize) < input.len() {
                input[cell as usize]
            } else {
                circuit.neutral()
            });
        }
        if let Some(&s) = memo.get(&(cell, tau)) {
            return Ok(s);
        }
        let l = state_at(circuit, input, memo, cell - 1, tau - 1)?;
        let m = state_at(circuit, input, memo, cell, tau - 1)?;
        let r = state_at(circuit, input, memo, cell + 1, tau - 1)?;
        let table = circuit.vertex_table(cell, tau)?;
        let s = table[(l as usize * circuit.sigma() as usize + m as usize)
            * circuit.sigma() as usize
            + r as usize];
        memo.insert((cell, tau), s);
        Ok(s)
    }

    let states: Vec<State> = input.iter().map(|&b| b as State).collect();
    if input.iter().any(|&b| b > 1) {
        return Err(Error::CircuitShape("input bits must be 0/1".into()));
    }
    if input.len() != circuit.n() as usize {
        return Err(Error::CircuitShape("input length mismatch".into()));
    }
    let mut memo = HashMap::new();
    state_at(circuit, &states, &mut memo, circuit.output_cell(), circuit.height())
}

/// Wire format of a circuit file: seeded, explicit, or uniform. `neutral`
/// defaults to the last state when omitted.
#[derive(Debug, Serialize, Deserialize)]
struct CircuitFile {
    n: u32,
    t: u32,
    sigma: u16,
    #[serde(default)]
    neutral: Option<State>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<VertexEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniform_delta: Option<Vec<State>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexEntry {
    time: u32,
    cell: i64,
    delta: Vec<State>,
}

impl TriangleCircuit {
    pub fn to_json(&self) -> String {
        let file = match &self.source {
            VertexSource::Seeded { seed } => CircuitFile {
                n: self.n,
                t: self.t,
                sigma: self.sigma,
                neutral: Some(self.neutral),
                seed: Some(*seed),
                vertices: None,
            },
            VertexSource::Explicit(map) => CircuitFile {
                n: self.n,
                t: self.t,
                sigma: self.sigma,
                neutral: Some(self.neutral),
                seed: None,
                vertices: Some(
                    map.iter()
                        .map(|(&(time, cell), delta)| VertexEntry { time, cell, delta: delta.clone() })
                        .collect(),
                ),
            },
        };
        serde_json::to_string(&file).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CircuitFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let neutral = file.neutral.unwrap_or((file.sigma.saturating_sub(1)).min(255) as State);
        let source = match (file.seed, file.vertices) {
            (Some(seed), None) => VertexSource::Seeded { seed },
            (None, Some(entries)) => VertexSource::Explicit(
                entries.into_iter().map(|e| ((e.time, e.cell), e.delta)).collect(),
            ),
            _ => {
                return Err(Error::Parse(
                    "circuit file needs exactly one of `seed` or `vertices`".into(),
                ))
            }
        };
        TriangleCircuit::new(file.n, file.t, file.sigma, neutral, source)
    }
}
