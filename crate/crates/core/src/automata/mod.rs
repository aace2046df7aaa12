//! One-dimensional cellular automata with a quiescent (neutral) state, the
//! as-soon-as-possible output schedule, non-uniform triangle circuits, and
//! the certificate extraction that connects them to decomposition
//! complexity.

mod extract;
mod indexing_ca;
mod triangle;

pub use extract::{extract_decomposition, min_state_bound, ExtractedCertificate, MinStateReport};
pub use indexing_ca::{IndexingCa, INDEXING_CA_TIME_FACTOR};
pub use triangle::{triangle_run, triangle_run_oracle, TriangleCircuit, VertexSource};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cell states are small integers below the rule's state count.
pub type State = u8;

/// A uniform radius-1 rule: new state = δ(left, center, right), with
/// distinguished input states `zero`/`one` and a stable `neutral` state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CARule {
    states: u16,
    zero: State,
    one: State,
    neutral: State,
    delta: Vec<State>,
}

impl CARule {
    pub fn new(states: u16, zero: State, one: State, neutral: State, delta: Vec<State>) -> Result<Self> {
        if states == 0 || states > 256 {
            return Err(Error::BadRule(format!("state count {states} out of range 1..=256")));
        }
        let sigma = states as usize;
        if delta.len() != sigma * sigma * sigma {
            return Err(Error::BadRule(format!(
                "delta has {} entries, want {}",
                delta.len(),
                sigma * sigma * sigma
            )));
        }
        for (i, &s) in delta.iter().enumerate() {
            if s as usize >= sigma {
                return Err(Error::BadRule(format!("delta[{i}] = {s} is not a state")));
            }
        }
        for &(name, s) in &[("zero", zero), ("one", one), ("neutral", neutral)] {
            if s as usize >= sigma {
                return Err(Error::BadRule(format!("{name} state {s} out of range")));
            }
        }
        let rule = CARule { states, zero, one, neutral, delta };
        if rule.apply(neutral, neutral, neutral) != neutral {
            return Err(Error::BadRule("neutral state is not stable".into()));
        }
        Ok(rule)
    }

    /// Builds the table from a transition function.
    pub fn from_fn(
        states: u16,
        zero: State,
        one: State,
        neutral: State,
        f: impl Fn(State, State, State) -> State,
    ) -> Result<Self> {
        let sigma = states as usize;
        let mut delta = vec![0; sigma * sigma * sigma];
        for l in 0..sigma {
            for c in 0..sigma {
                for r in 0..sigma {
                    delta[(l * sigma + c) * sigma + r] = f(l as State, c as State, r as State);
                }
            }
        }
        CARule::new(states, zero, one, neutral, delta)
    }

    pub fn states(&self) -> u16 {
        self.states
    }

    pub fn zero(&self) -> State {
        self.zero
    }

    pub fn one(&self) -> State {
        self.one
    }

    pub fn neutral(&self) -> State {
        self.neutral
    }

    pub fn delta(&self) -> &[State] {
        &self.delta
    }

    #[inline]
    pub fn apply(&self, l: State, c: State, r: State) -> State {
        let sigma = self.states as usize;
        self.delta[(l as usize * sigma + c as usize) * sigma + r as usize]
    }
}

/// Wire format of a rule file.
#[derive(Debug, Serialize, Deserialize)]
struct RuleFile {
    states: u16,
    neutral: State,
    zero: State,
    one: State,
    delta: Vec<State>,
}

impl CARule {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&RuleFile {
            states: self.states,
            neutral: self.neutral,
            zero: self.zero,
            one: self.one,
            delta: self.delta.clone(),
        })
        .expect("rule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RuleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        CARule::new(file.states, file.zero, file.one, file.neutral, file.delta)
    }
}

/// A biinfinite array abstracted as a finite window; cells outside the
/// window are neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub offset: i64,
    pub cells: Vec<State>,
}

impl Configuration {
    /// Encodes an input bit string at cells `0 .. n-1`.
    pub fn from_bits(rule: &CARule, bits: &[u8]) -> Result<Self> {
        let mut cells = Vec::with_capacity(bits.len());
        for &b in bits {
            match b {
                0 => cells.push(rule.zero()),
                1 => cells.push(rule.one()),
                other => return Err(Error::BadRule(format!("input bit {other} is not 0/1"))),
            }
        }
        Ok(Configuration { offset: 0, cells })
    }

    /// State at an absolute cell index (neutral outside the window).
    pub fn get(&self, rule: &CARule, cell: i64) -> State {
        let idx = cell - self.offset;
        if idx < 0 || idx as usize >= self.cells.len() {
            rule.neutral()
        } else {
            self.cells[idx as usize]
        }
    }

    /// One synchronous step; the window grows by one cell on each side.
    pub fn step(&self, rule: &CARule) -> Configuration {
        let n = self.cells.len();
        let mut next = Vec::with_capacity(n + 2);
        let at = |i: isize| -> State {
            if i < 0 || i as usize >= n {
                rule.neutral()
            } else {
                self.cells[i as usize]
            }
        };
        for i in -1..=n as isize {
            next.push(rule.apply(at(i - 1), at(i), at(i + 1)));
        }
        Configuration { offset: self.offset - 1, cells: next }
    }
}

/// Full trace of a run: `rows[t]` is the configuration after `t` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub rows: Vec<Configuration>,
}

impl Trace {
    /// Dump format: a window-offset header, then one line per time step with
    /// states as integers separated by spaces.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.rows.first() {
            out.push_str(&format!("offset {}\n", first.offset));
        }
        for row in &self.rows {
            let line: Vec<String> = row.cells.iter().map(|s| s.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn last(&self) -> &Configuration {
        self.rows.last().expect("trace has at least the initial row")
    }
}

/// Runs `steps` synchronous updates from the given start configuration.
pub fn ca_run_config(rule: &CARule, start: Configuration, steps: u32) -> Result<Trace> {
    for &s in &start.cells {
        if s as u16 >= rule.states() {
            return Err(Error::BadRule(format!("configuration state {s} out of range")));
        }
    }
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(start);
    for _ in 0..steps {
        let next = rows.last().unwrap().step(rule);
        rows.push(next);
    }
    Ok(Trace { rows })
}

/// Runs from an input bit string laid out at cells `0 .. n-1`.
pub fn ca_run(rule: &CARule, input: &[u8], steps: u32) -> Result<Trace> {
    ca_run_config(rule, Configuration::from_bits(rule, input)?, steps)
}

/// The as-soon-as-possible output point for an `n`-cell input: cell
/// `⌊(n-1)/2⌋` at time `⌈(n-1)/2⌉`, the earliest space-time point whose
/// light cone covers all of `0 .. n-1`.
pub fn asap_schedule(n: u32) -> (i64, u32) {
    assert!(n >= 1, "asap schedule needs n >= 1");
    (((n - 1) / 2) as i64, n / 2)
}
