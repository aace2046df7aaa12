//! Exact decomposition complexity, constructive upper bounds, counting-bound
//! calculators and the distributional (best-agreement) search.

mod bounds;
mod distributional;
mod search;
mod upper;

pub use bounds::{
    counting_lower_bound, counting_lower_bound_approx, indexing_lower_bound, BoundKind,
    BoundReport, InequalityTerms,
};
pub use distributional::{best_agreement, AgreementOutcome, DistributionalGuard};
pub use search::{feasible, Feasibility, SearchBudget, SearchStats};
pub use upper::{upper_bound_slice, upper_bound_split, Side};

use crate::certificate::DecompositionCertificate;
use crate::error::Result;
use crate::function::TernaryFunction;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// The reported value is the decomposition complexity.
    Exact,
    /// The budget ran out; only the `[lower, upper]` bracket is known.
    BoundsOnly,
    /// Nothing beyond the trivial bracket was established.
    Unknown,
}

/// Result of [`exact_dc`]. Any included certificate verifies, and it attains
/// `upper`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub lower: u32,
    pub upper: u32,
    pub certificate: Option<DecompositionCertificate>,
    pub stats: SearchStats,
}

impl SolveResult {
    /// The exact complexity when `status == Exact`.
    pub fn value(&self) -> Option<u32> {
        (self.status == SolveStatus::Exact).then_some(self.upper)
    }
}

/// Computes the decomposition complexity of `f` by iterating `m = 0, 1, 2, …`
/// and trying every split `u + v = m` (ascending `u`). The first feasible
/// split gives the answer; `m = n` never needs searching because the split
/// construction always works there.
///
/// On budget exhaustion the result brackets the value: every `m` below
/// `lower` was refuted exhaustively, and `upper` carries a verified
/// certificate.
pub fn exact_dc(f: &TernaryFunction, budget: &SearchBudget) -> Result<SolveResult> {
    let n = f.input_bits();
    let mut stats = SearchStats::default();
    let mut inner = budget.clone();
    inner.allow_unknown = true;

    // Splits at m = n never need searching, so the loop stops short of n
    // unless an explicit max_m cuts it off even earlier.
    let ceiling = budget.max_m.map_or(n, |m| (m + 1).min(n));
    for m in 0..ceiling {
        for u in 0..=m {
            let v = m - u;
            let (res, s) = feasible(f, u, v, &inner)?;
            stats.nodes += s.nodes;
            stats.elapsed += s.elapsed;
            if let Some(max) = inner.max_nodes.as_mut() {
                *max = max.saturating_sub(s.nodes);
            }
            if let Some(max) = inner.max_time.as_mut() {
                *max = max.saturating_sub(s.elapsed);
            }
            match res {
                Feasibility::Feasible(cert) => {
                    debug_assert!(crate::certificate::verify_certificate(f, &cert)?);
                    return Ok(SolveResult {
                        status: SolveStatus::Exact,
                        lower: m,
                        upper: m,
                        certificate: Some(cert),
                        stats,
                    });
                }
                Feasibility::Infeasible => {}
                Feasibility::Unknown => {
                    // Budget died inside this m: everything below m is refuted.
                    let cert = upper_bound_split(f, f.q())?;
                    return Ok(SolveResult {
                        status: SolveStatus::BoundsOnly,
                        lower: m,
                        upper: n,
                        certificate: Some(cert),
                        stats,
                    });
                }
            }
        }
    }

    let cert = upper_bound_split(f, f.q())?;
    if ceiling == n {
        // All m < n refuted; the split construction is feasible at m = n.
        Ok(SolveResult {
            status: SolveStatus::Exact,
            lower: n,
            upper: n,
            certificate: Some(cert),
            stats,
        })
    } else {
        Ok(SolveResult {
            status: SolveStatus::BoundsOnly,
            lower: ceiling,
            upper: n,
            certificate: Some(cert),
            stats,
        })
    }
}
