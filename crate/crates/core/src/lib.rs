//! Decomposition complexity of ternary Boolean functions.
//!
//! A function `T : B^p × B^q × B^r → B^s` has decomposition complexity at
//! most `n` when `T(x,y,z) = t(a(x,y), b(y,z))` for some `a`, `b` with `u`-
//! and `v`-bit outputs, `u + v <= n`. This crate provides the truth-table
//! model and built-in families ([`function`]), certificate verification
//! ([`certificate`]), exact and approximate solvers plus counting-bound
//! calculators ([`solver`]), the GF(2) polynomial machinery and the
//! sublinear three-message protocol for xor-indexing ([`f2poly`]), and
//! cellular-automaton reductions ([`automata`]).

pub mod automata;
pub mod certificate;
pub mod error;
pub mod f2poly;
pub mod function;
pub mod solver;

pub use certificate::{agreement, first_counterexample, verify_certificate, DecompositionCertificate};
pub use error::{Error, Result};
pub use function::{
    bit_at, make_family, random_predicate, FamilySpec, InputTriple, TernaryFunction,
};
pub use solver::{
    best_agreement, counting_lower_bound, counting_lower_bound_approx, exact_dc, feasible,
    indexing_lower_bound, upper_bound_slice, upper_bound_split, BoundKind, BoundReport,
    Feasibility, SearchBudget, SearchStats, Side, SolveResult, SolveStatus,
};

/// Installs a global rayon pool sized by the `DECOMP_THREADS` environment
/// variable, when set. Safe to call more than once; later calls are no-ops.
pub fn init_thread_pool_from_env() {
    if let Ok(text) = std::env::var("DECOMP_THREADS") {
        if let Ok(n) = text.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
