//! Reading a decomposition certificate out of a triangle-circuit run, and
//! the state-count lower bound that follows from it.
//!
//! For an input split `x · y · z` of shape `k + f + k` and a circuit of
//! height `t* + Δ`, the row at time `t* - k` restricted to the cells that
//! feed the output vertex is `2(k+Δ)+1` wide. Its left `k+Δ+1` cells depend
//! only on `(x, y)` and its right `k+Δ` cells only on `(y, z)`: the
//! dependency cone of the left block at that time stops short of the last
//! `k` input positions, and symmetrically. Packing the two blocks gives
//! `a` and `b`; the remaining sub-triangle is `t`.

use super::triangle::TriangleCircuit;
use super::{asap_schedule, State};
use crate::certificate::DecompositionCertificate;
use crate::error::{Error, Result};
use crate::function::TernaryFunction;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Result of [`extract_decomposition`]: the certificate together with the
/// function it decomposes (output states as `⌈log2 σ⌉`-bit values) and the
/// geometry it was read from.
#[derive(Debug, Clone)]
pub struct ExtractedCertificate {
    pub certificate: DecompositionCertificate,
    pub function: TernaryFunction,
    /// Time of the extracted row, `t* - k`.
    pub read_time: u32,
    /// Inclusive cell range packed into `a` (the middle cell belongs here).
    pub a_cells: (i64, i64),
    /// Inclusive cell range packed into `b`.
    pub b_cells: (i64, i64),
}

fn ceil_log2_u16(v: u16) -> u32 {
    let v = v as u32;
    if v <= 1 {
        0
    } else {
        32 - (v - 1).leading_zeros()
    }
}

/// Extracts a decomposition certificate from a triangle circuit whose input
/// splits as `k + f + k` and whose height is the ASAP time plus `delta`.
pub fn extract_decomposition(
    circuit: &TriangleCircuit,
    k: u32,
    f_mid: u32,
    delta: u32,
) -> Result<ExtractedCertificate> {
    if k == 0 {
        return Err(Error::ExtractionGeometry("k must be positive".into()));
    }
    if f_mid == 0 {
        return Err(Error::ExtractionGeometry(
            "middle block must be non-empty (f = 0 degenerates)".into(),
        ));
    }
    let n = 2 * k + f_mid;
    if circuit.n() != n {
        return Err(Error::CircuitShape(format!(
            "circuit input length {} does not match k+f+k = {n}",
            circuit.n()
        )));
    }
    let (c_star, t_star) = asap_schedule(n);
    if circuit.height() != t_star + delta {
        return Err(Error::CircuitShape(format!(
            "circuit height {} does not match t* + delta = {}",
            circuit.height(),
            t_star + delta
        )));
    }
    debug_assert!(t_star >= k, "f >= 1 guarantees t* >= k");
    let read_time = t_star - k;
    let s_bits = ceil_log2_u16(circuit.sigma()).max(1);
    let aw = (k + delta + 1) as usize; // cells [c* - k - delta, c*]
    let bw = (k + delta) as usize; // cells [c* + 1, c* + k + delta]
    let u = aw as u32 * s_bits;
    let v = bw as u32 * s_bits;
    if u + v > 30 {
        return Err(Error::SizeCeiling { got: u + v, ceiling: 30 });
    }

    let sigma = circuit.sigma() as usize;
    let lo = c_star - (k + delta) as i64;
    let hi = c_star + (k + delta) as i64;
    // row_at returns cells [c* - (height - read_time), ...]; height - read_time
    // = k + delta + k... the row spans more cells than we pack, so index
    // relative to its own low end.
    let row_radius = (circuit.height() - read_time) as i64;
    let row_lo = c_star - row_radius;

    let pack = |states: &[State]| -> u64 {
        states.iter().fold(0u64, |acc, &s| (acc << s_bits) | s as u64)
    };

    let mut input = vec![0u8; n as usize];
    let mut a = Vec::with_capacity(1usize << (k + f_mid));
    for xy in 0..1u64 << (k + f_mid) {
        let x = xy >> f_mid;
        let y = xy & ((1u64 << f_mid) - 1);
        for i in 0..k {
            input[i as usize] = crate::function::bit_at(x, k, i) as u8;
        }
        for i in 0..f_mid {
            input[(k + i) as usize] = crate::function::bit_at(y, f_mid, i) as u8;
        }
        for i in 0..k {
            input[(k + f_mid + i) as usize] = 0;
        }
        let row = circuit.row_at(&input, read_time)?;
        let a_states = &row[(lo - row_lo) as usize..=(c_star - row_lo) as usize];
        a.push(pack(a_states));
    }

    let mut b = Vec::with_capacity(1usize << (f_mid + k));
    for yz in 0..1u64 << (f_mid + k) {
        let y = yz >> k;
        let z = yz & ((1u64 << k) - 1);
        for i in 0..k {
            input[i as usize] = 0;
        }
        for i in 0..f_mid {
            input[(k + i) as usize] = crate::function::bit_at(y, f_mid, i) as u8;
        }
        for i in 0..k {
            input[(k + f_mid + i) as usize] = crate::function::bit_at(z, k, i) as u8;
        }
        let row = circuit.row_at(&input, read_time)?;
        let b_states = &row[(c_star + 1 - row_lo) as usize..=(hi - row_lo) as usize];
        b.push(pack(b_states));
    }

    // t: evaluate the upper sub-triangle from an unpacked (α, β) row.
    let state_mask = (1u64 << s_bits) - 1;
    let unpack = |mut value: u64, width: usize| -> Option<Vec<State>> {
        let mut states = vec![0 as State; width];
        for i in (0..width).rev() {
            let s = value & state_mask;
            if s as usize >= sigma {
                return None;
            }
            states[i] = s as State;
            value >>= s_bits;
        }
        Some(states)
    };

    let mut t_table = Vec::with_capacity(1usize << (u + v));
    for av in 0..1u64 << u {
        let a_states = unpack(av, aw);
        for bv in 0..1u64 << v {
            let (a_states, b_states) = match (&a_states, unpack(bv, bw)) {
                (Some(a), Some(b)) => (a, b),
                // Bit patterns that decode past σ never occur as messages.
                _ => {
                    t_table.push(0);
                    continue;
                }
            };
            let mut row: Vec<State> =
                a_states.iter().chain(b_states.iter()).copied().collect();
            let mut cur_lo = lo;
            for tau in read_time + 1..=circuit.height() {
                let radius = (circuit.height() - tau) as i64;
                let (nlo, nhi) = (c_star - radius, c_star + radius);
                let mut next = Vec::with_capacity((nhi - nlo + 1) as usize);
                for c in nlo..=nhi {
                    let table = circuit.vertex_table(c, tau)?;
                    let idx = (c - cur_lo) as usize;
                    next.push(
                        table[(row[idx - 1] as usize * sigma + row[idx] as usize) * sigma
                            + row[idx + 1] as usize],
                    );
                }
                row = next;
                cur_lo = nlo;
            }
            t_table.push(row[0] as u64);
        }
    }

    let certificate = DecompositionCertificate { u, v, a, b, t: t_table };

    // The function the certificate must reproduce: circuit outputs as
    // s_bits-bit values.
    let mut table = Vec::with_capacity(1usize << n);
    for xyz in 0..1u64 << n {
        for i in 0..n {
            input[i as usize] = crate::function::bit_at(xyz, n, i) as u8;
        }
        table.push(super::triangle::triangle_run(circuit, &input)? as u64);
    }
    let function = TernaryFunction::new(k, f_mid, k, s_bits, table)?;

    Ok(ExtractedCertificate {
        certificate,
        function,
        read_time,
        a_cells: (lo, c_star),
        b_cells: (c_star + 1, hi),
    })
}

/// Lower bound on the state count of any ASAP(+Δ) triangle circuit computing
/// the indexing predicate at size `k`: combining `dc(T_k) >= 2^k` with the
/// extraction width `2k + 2Δ + 1` forces
/// `σ >= ⌈2^(2^k / (2k + 2Δ + 1))⌉`, i.e. the least σ with
/// `σ^(2k+2Δ+1) >= 2^(2^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinStateReport {
    pub k: u32,
    pub delta: u32,
    /// Width of the extracted message row, `2k + 2Δ + 1`.
    pub line_cells: u32,
    /// The decomposition-complexity lower bound `2^k` being beaten.
    pub dc_lower: u64,
    /// The resulting minimal state count.
    pub sigma: u64,
}

pub fn min_state_bound(k: u32, delta: u32) -> Result<MinStateReport> {
    if k == 0 || k > 10 {
        return Err(Error::ExtractionGeometry(format!(
            "state bound supported for 1 <= k <= 10, got {k}"
        )));
    }
    if delta > 10_000 {
        return Err(Error::ExtractionGeometry(format!("delta = {delta} too large")));
    }
    let cells = 2 * k + 2 * delta + 1;
    let dc_lower = 1u64 << k;
    let need = BigUint::one() << dc_lower; // 2^(2^k)
    let sat = |sigma: u64| BigUint::from(sigma).pow(cells) >= need;
    let mut lo = 1u64; // never satisfies (1^c = 1 < 2^(2^k))
    let mut hi = 2u64;
    while !sat(hi) {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if sat(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MinStateReport { k, delta, line_cells: cells, dc_lower, sigma: hi })
}
