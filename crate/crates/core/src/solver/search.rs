//! Backtracking search for a decomposition with fixed message widths.
//!
//! The search assigns colors `a[·] ∈ [0, 2^u)` and `b[·] ∈ [0, 2^v)` to the
//! two message domains, interleaved in ascending index order, and maintains a
//! partial `t`-table. The only constraint is well-definedness of `t`, so the
//! single pruning signal is a `t[α,β]` entry forced to two different values.
//! Colors are canonicalized to first-use order on each side, which quotients
//! out the `u!·v!` color permutations without losing completeness.

use crate::certificate::DecompositionCertificate;
use crate::error::{Error, Result};
use crate::function::TernaryFunction;
use std::time::{Duration, Instant};

/// Limits for the exhaustive searches. All limits optional.
#[derive(Debug, Clone, Default)]
pub struct SearchBudget {
    /// Largest total message size `u + v` that [`super::exact_dc`] will try.
    pub max_m: Option<u32>,
    /// Node-visit limit (one node per attempted color assignment).
    pub max_nodes: Option<u64>,
    /// Wall-clock limit.
    pub max_time: Option<Duration>,
    /// Permit `Unknown` results instead of failing when the budget runs out.
    pub allow_unknown: bool,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget::default()
    }

    pub fn with_nodes(nodes: u64) -> Self {
        SearchBudget { max_nodes: Some(nodes), ..SearchBudget::default() }
    }
}

/// Counters reported by the searches.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Outcome of a fixed-width feasibility search.
#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(DecompositionCertificate),
    Infeasible,
    /// Budget ran out before the space was exhausted.
    Unknown,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

const MAX_T_BITS: u32 = 30;

#[derive(Clone, Copy)]
enum Cell {
    A(u32),
    B(u32),
}

struct Frame {
    /// Next color to try after backtracking to this depth.
    next: u64,
    /// Length of the t-trail before this assignment.
    mark: usize,
    /// Whether this assignment introduced a fresh color.
    bumped: bool,
}

/// Searches for a certificate with exactly `u`-bit and `v`-bit messages.
///
/// Returns `Feasible` with a verifying certificate, `Infeasible` when the
/// canonical search space is exhausted, or `Unknown` when the budget ran out
/// and `budget.allow_unknown` is set (otherwise the budget is an error).
/// The search order is fixed, so the result is deterministic.
pub fn feasible(
    f: &TernaryFunction,
    u: u32,
    v: u32,
    budget: &SearchBudget,
) -> Result<(Feasibility, SearchStats)> {
    if u + v > MAX_T_BITS || (u + v) as u64 + f.s() as u64 > 62 {
        return Err(Error::SizeCeiling { got: u + v, ceiling: MAX_T_BITS });
    }
    let start = Instant::now();
    let (p, q, r) = (f.p(), f.q(), f.r());
    let na = 1usize << (p + q);
    let nb = 1usize << (q + r);
    let colors_a = 1u64 << u;
    let colors_b = 1u64 << v;

    // Both domains interleaved by the shared middle argument: all cells of a
    // y-block are adjacent in the order, so every triple's constraint fires
    // as soon as its two cells are colored. Within a block (and across
    // blocks) the order is fixed and ascending, keeping results
    // deterministic.
    let mut order = Vec::with_capacity(na + nb);
    for y in 0..1u32 << q {
        for x in 0..1u32 << p {
            order.push(Cell::A((x << q) | y));
        }
        for z in 0..1u32 << r {
            order.push(Cell::B((y << r) | z));
        }
    }

    const UNSET: u64 = u64::MAX;
    let mut color_a = vec![UNSET; na];
    let mut color_b = vec![UNSET; nb];
    let mut used_a = 0u64;
    let mut used_b = 0u64;
    let mut t_set = vec![false; 1usize << (u + v)];
    let mut t_val = vec![0u64; 1usize << (u + v)];
    let mut trail: Vec<usize> = Vec::new();
    let mut frames: Vec<Frame> = Vec::with_capacity(order.len());
    let mut next_color = 0u64;
    let mut nodes = 0u64;
    let mut stats = SearchStats::default();

    macro_rules! out_of_budget {
        () => {
            budget.max_nodes.is_some_and(|m| nodes >= m)
                || (nodes.is_multiple_of(1024)
                    && budget.max_time.is_some_and(|t| start.elapsed() >= t))
        };
    }

    let mut depth = 0usize;
    loop {
        if depth == order.len() {
            // Full consistent assignment: unconstrained t-entries default to 0.
            stats.nodes = nodes;
            stats.elapsed = start.elapsed();
            let cert = DecompositionCertificate {
                u,
                v,
                a: color_a,
                b: color_b,
                t: t_val
                    .iter()
                    .zip(&t_set)
                    .map(|(&w, &set)| if set { w } else { 0 })
                    .collect(),
            };
            return Ok((Feasibility::Feasible(cert), stats));
        }

        let cell = order[depth];
        let limit = match cell {
            Cell::A(_) => (used_a + 1).min(colors_a),
            Cell::B(_) => (used_b + 1).min(colors_b),
        };

        let mut advanced = false;
        let mut color = next_color;
        while color < limit {
            nodes += 1;
            if out_of_budget!() {
                stats.nodes = nodes;
                stats.elapsed = start.elapsed();
                if budget.allow_unknown {
                    return Ok((Feasibility::Unknown, stats));
                }
                return Err(Error::BudgetExhausted { nodes });
            }

            let mark = trail.len();
            let ok = match cell {
                Cell::A(idx) => {
                    let x = (idx >> q) as u64;
                    let y = (idx as u64) & ((1u64 << q) - 1);
                    let mut consistent = true;
                    for z in 0..1u64 << r {
                        let bidx = ((y << r) | z) as usize;
                        let beta = color_b[bidx];
                        if beta == UNSET {
                            continue;
                        }
                        let tidx = ((color << v) | beta) as usize;
                        let want = f.eval_unchecked(x, y, z);
                        if t_set[tidx] {
                            if t_val[tidx] != want {
                                consistent = false;
                                break;
                            }
                        } else {
                            t_set[tidx] = true;
                            t_val[tidx] = want;
                            trail.push(tidx);
                        }
                    }
                    consistent
                }
                Cell::B(idx) => {
                    let y = (idx >> r) as u64;
                    let z = (idx as u64) & ((1u64 << r) - 1);
                    let mut consistent = true;
                    for x in 0..1u64 << p {
                        let aidx = ((x << q) | y) as usize;
                        let alpha = color_a[aidx];
                        if alpha == UNSET {
                            continue;
                        }
                        let tidx = ((alpha << v) | color) as usize;
                        let want = f.eval_unchecked(x, y, z);
                        if t_set[tidx] {
                            if t_val[tidx] != want {
                                consistent = false;
                                break;
                            }
                        } else {
                            t_set[tidx] = true;
                            t_val[tidx] = want;
                            trail.push(tidx);
                        }
                    }
                    consistent
                }
            };

            if ok {
                let bumped;
                match cell {
                    Cell::A(idx) => {
                        color_a[idx as usize] = color;
                        bumped = color == used_a;
                        if bumped {
                            used_a += 1;
                        }
                    }
                    Cell::B(idx) => {
                        color_b[idx as usize] = color;
                        bumped = color == used_b;
                        if bumped {
                            used_b += 1;
                        }
                    }
                }
                frames.push(Frame { next: color + 1, mark, bumped });
                depth += 1;
                next_color = 0;
                advanced = true;
                break;
            }

            // Undo the partial t-writes of the failed attempt.
            for &tidx in &trail[mark..] {
                t_set[tidx] = false;
            }
            trail.truncate(mark);
            color += 1;
        }

        if advanced {
            continue;
        }

        // Exhausted colors at this depth: backtrack.
        match frames.pop() {
            None => {
                stats.nodes = nodes;
                stats.elapsed = start.elapsed();
                return Ok((Feasibility::Infeasible, stats));
            }
            Some(frame) => {
                depth -= 1;
                match order[depth] {
                    Cell::A(idx) => {
                        color_a[idx as usize] = UNSET;
                        if frame.bumped {
                            used_a -= 1;
                        }
                    }
                    Cell::B(idx) => {
                        color_b[idx as usize] = UNSET;
                        if frame.bumped {
                            used_b -= 1;
                        }
                    }
                }
                for &tidx in &trail[frame.mark..] {
                    t_set[tidx] = false;
                }
                trail.truncate(frame.mark);
                next_color = frame.next;
            }
        }
    }
}
