//! Best-agreement search: the maximum fraction of inputs on which any
//! decomposition with fixed message widths can reproduce a predicate.
//!
//! Branch and bound over colorings of the two message domains. For a fixed
//! coloring the optimal `t` is the per-cell majority, so only colorings are
//! searched; the bound counts every undecided triple as a future match.

use crate::certificate::DecompositionCertificate;
use crate::error::{Error, Result};
use crate::function::TernaryFunction;
use crate::solver::search::{SearchBudget, SearchStats};
use num_rational::Ratio;
use std::time::Instant;

/// Guard rails against accidentally enormous searches; override deliberately.
#[derive(Debug, Clone)]
pub struct DistributionalGuard {
    pub max_domain: usize,
    pub max_total_bits: u32,
    pub override_guard: bool,
}

impl Default for DistributionalGuard {
    fn default() -> Self {
        DistributionalGuard { max_domain: 32, max_total_bits: 4, override_guard: false }
    }
}

#[derive(Debug, Clone)]
pub struct AgreementOutcome {
    /// Best agreement found, as an exact fraction over `2^(p+q+r)`.
    pub value: Ratio<u64>,
    /// A certificate attaining `value`.
    pub certificate: DecompositionCertificate,
    /// False when the budget ran out; `value` is then only a lower bound on
    /// the optimum.
    pub optimal: bool,
    pub stats: SearchStats,
}

#[derive(Clone, Copy)]
enum Cell {
    A(u32),
    B(u32),
}

struct Frame {
    next: u64,
    mark: usize,
    bumped: bool,
}

/// Maximizes [`crate::certificate::agreement`] over all certificates with the
/// given message widths. Deterministic: the returned certificate is the first
/// optimum in the fixed search order.
pub fn best_agreement(
    f: &TernaryFunction,
    u: u32,
    v: u32,
    budget: &SearchBudget,
    guard: &DistributionalGuard,
) -> Result<AgreementOutcome> {
    if f.s() != 1 {
        return Err(Error::NotPredicate(f.s()));
    }
    let (p, q, r) = (f.p(), f.q(), f.r());
    let na = 1usize << (p + q);
    let nb = 1usize << (q + r);
    if !guard.override_guard
        && (na > guard.max_domain || nb > guard.max_domain || u + v > guard.max_total_bits)
    {
        return Err(Error::CertificateShape(format!(
            "distributional guard: domains ({na}, {nb}) or u+v = {} exceed ({}, {}); override to proceed",
            u + v,
            guard.max_domain,
            guard.max_total_bits
        )));
    }

    let start = Instant::now();
    let colors_a = 1u64 << u;
    let colors_b = 1u64 << v;
    let total = f.table().len() as u64;

    // Same y-grouped assignment order as the feasibility search: every
    // triple is decided as soon as its two cells are colored, which keeps
    // the optimistic bound honest early.
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
    let nt = 1usize << (u + v);
    let mut color_a = vec![UNSET; na];
    let mut color_b = vec![UNSET; nb];
    let mut used_a = 0u64;
    let mut used_b = 0u64;
    // Per (α, β) cell: counts of decided triples wanting 0 and wanting 1.
    let mut cnt = vec![[0u64; 2]; nt];
    let mut maj_sum = 0u64; // Σ max(cnt0, cnt1)
    let mut decided = 0u64;
    let mut trail: Vec<usize> = Vec::new(); // (tidx << 1) | wanted bit

    // Baseline: the all-zero coloring with majority t, so a certificate
    // exists even under a tiny budget.
    let ones: u64 = f.table().iter().sum();
    let majority_value = u64::from(ones * 2 > total);
    let mut best_val = ones.max(total - ones);
    let mut best_cert = DecompositionCertificate {
        u,
        v,
        a: vec![0; na],
        b: vec![0; nb],
        t: vec![majority_value; nt],
    };
    let mut nodes = 0u64;
    let mut exhausted = false;

    let mut frames: Vec<Frame> = Vec::with_capacity(order.len());
    let mut next_color = 0u64;
    let mut depth = 0usize;

    let build_cert = |color_a: &[u64], color_b: &[u64], cnt: &[[u64; 2]]| {
        DecompositionCertificate {
            u,
            v,
            a: color_a.to_vec(),
            b: color_b.to_vec(),
            t: cnt.iter().map(|c| u64::from(c[1] > c[0])).collect(),
        }
    };

    'search: loop {
        if depth == order.len() {
            if maj_sum > best_val {
                best_val = maj_sum;
                best_cert = build_cert(&color_a, &color_b, &cnt);
                if best_val == total {
                    break 'search;
                }
            }
            // Treat the leaf like a failed branch: force a backtrack.
            match frames.pop() {
                None => break 'search,
                Some(frame) => {
                    depth -= 1;
                    undo(
                        &order,
                        depth,
                        &frame,
                        &mut color_a,
                        &mut color_b,
                        &mut used_a,
                        &mut used_b,
                        &mut trail,
                        &mut cnt,
                        &mut maj_sum,
                        &mut decided,
                    );
                    next_color = frame.next;
                }
            }
            continue;
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
            if budget.max_nodes.is_some_and(|m| nodes >= m)
                || (nodes.is_multiple_of(1024)
                    && budget.max_time.is_some_and(|t| start.elapsed() >= t))
            {
                exhausted = true;
                break 'search;
            }

            let mark = trail.len();
            apply(
                f, cell, color, v, &color_a, &color_b, &mut trail, &mut cnt, &mut maj_sum,
                &mut decided,
            );

            // Optimistic completion: every undecided triple counts as a match.
            if maj_sum + (total - decided) > best_val {
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

            for &entry in &trail[mark..] {
                let tidx = entry >> 1;
                let bit = entry & 1;
                let old_max = cnt[tidx][0].max(cnt[tidx][1]);
                cnt[tidx][bit] -= 1;
                let new_max = cnt[tidx][0].max(cnt[tidx][1]);
                maj_sum -= old_max - new_max;
                decided -= 1;
            }
            trail.truncate(mark);
            color += 1;
        }

        if advanced {
            continue;
        }
        match frames.pop() {
            None => break 'search,
            Some(frame) => {
                depth -= 1;
                undo(
                    &order,
                    depth,
                    &frame,
                    &mut color_a,
                    &mut color_b,
                    &mut used_a,
                    &mut used_b,
                    &mut trail,
                    &mut cnt,
                    &mut maj_sum,
                    &mut decided,
                );
                next_color = frame.next;
            }
        }
    }

    let stats = SearchStats { nodes, elapsed: start.elapsed() };
    debug_assert!(crate::certificate::agreement(f, &best_cert)? == Ratio::new(best_val, total));
    Ok(AgreementOutcome {
        value: Ratio::new(best_val, total),
        certificate: best_cert,
        optimal: !exhausted,
        stats,
    })
}

#[allow(clippy::too_many_arguments)]
fn apply(
    f: &TernaryFunction,
    cell: Cell,
    color: u64,
    v: u32,
    color_a: &[u64],
    color_b: &[u64],
    trail: &mut Vec<usize>,
    cnt: &mut [[u64; 2]],
    maj_sum: &mut u64,
    decided: &mut u64,
) {
    const UNSET: u64 = u64::MAX;
    let (p, q, r) = (f.p(), f.q(), f.r());
    match cell {
        Cell::A(idx) => {
            let x = (idx >> q) as u64;
            let y = (idx as u64) & ((1u64 << q) - 1);
            for z in 0..1u64 << r {
                let beta = color_b[((y << r) | z) as usize];
                if beta == UNSET {
                    continue;
                }
                let tidx = ((color << v) | beta) as usize;
                let bit = f.eval_unchecked(x, y, z) as usize;
                let old_max = cnt[tidx][0].max(cnt[tidx][1]);
                cnt[tidx][bit] += 1;
                let new_max = cnt[tidx][0].max(cnt[tidx][1]);
                *maj_sum += new_max - old_max;
                *decided += 1;
                trail.push((tidx << 1) | bit);
            }
        }
        Cell::B(idx) => {
            let y = (idx >> r) as u64;
            let z = (idx as u64) & ((1u64 << r) - 1);
            for x in 0..1u64 << p {
                let alpha = color_a[((x << q) | y) as usize];
                if alpha == UNSET {
                    continue;
                }
                let tidx = ((alpha << v) | color) as usize;
                let bit = f.eval_unchecked(x, y, z) as usize;
                let old_max = cnt[tidx][0].max(cnt[tidx][1]);
                cnt[tidx][bit] += 1;
                let new_max = cnt[tidx][0].max(cnt[tidx][1]);
                *maj_sum += new_max - old_max;
                *decided += 1;
                trail.push((tidx << 1) | bit);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn undo(
    order: &[Cell],
    depth: usize,
    frame: &Frame,
    color_a: &mut [u64],
    color_b: &mut [u64],
    used_a: &mut u64,
    used_b: &mut u64,
    trail: &mut Vec<usize>,
    cnt: &mut [[u64; 2]],
    maj_sum: &mut u64,
    decided: &mut u64,
) {
    const UNSET: u64 = u64::MAX;
    match order[depth] {
        Cell::A(idx) => {
            color_a[idx as usize] = UNSET;
            if frame.bumped {
                *used_a -= 1;
            }
        }
        Cell::B(idx) => {
            color_b[idx as usize] = UNSET;
            if frame.bumped {
                *used_b -= 1;
            }
        }
    }
    for &entry in &trail[frame.mark..] {
        let tidx = entry >> 1;
        let bit = entry & 1;
        let old_max = cnt[tidx][0].max(cnt[tidx][1]);
        cnt[tidx][bit] -= 1;
        let new_max = cnt[tidx][0].max(cnt[tidx][1]);
        *maj_sum -= old_max - new_max;
        *decided -= 1;
    }
    trail.truncate(frame.mark);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::agreement;
    use crate::function::{make_family, random_predicate, FamilySpec};
    use crate::solver::search::{feasible, Feasibility};

    fn best(f: &TernaryFunction, u: u32, v: u32) -> Ratio<u64> {
        let out = best_agreement(f, u, v, &SearchBudget::unlimited(), &Default::default())
            .unwrap();
        assert!(out.optimal);
        assert_eq!(agreement(f, &out.certificate).unwrap(), out.value);
        out.value
    }

    /// Exhaustive oracle over every (a, b) coloring with majority t.
    fn oracle_best(f: &TernaryFunction, u: u32, v: u32) -> Ratio<u64> {
        let na = 1usize << (f.p() + f.q());
        let nb = 1usize << (f.q() + f.r());
        let ca = 1u64 << u;
        let cb = 1u64 << v;
        let nt = 1usize << (u + v);
        let total = f.table().len() as u64;
        let mut best = 0u64;
        for ea in 0..ca.pow(na as u32) {
            let mut a = Vec::with_capacity(na);
            let mut w = ea;
            for _ in 0..na {
                a.push(w % ca);
                w /= ca;
            }
            for eb in 0..cb.pow(nb as u32) {
                let mut b = Vec::with_capacity(nb);
                let mut w = eb;
                for _ in 0..nb {
                    b.push(w % cb);
                    w /= cb;
                }
                let mut cnt = vec![[0u64; 2]; nt];
                for tr in f.triples() {
                    let alpha = a[((tr.x << f.q()) | tr.y) as usize];
                    let beta = b[((tr.y << f.r()) | tr.z) as usize];
                    cnt[((alpha << v) | beta) as usize][f.eval(tr).unwrap() as usize] += 1;
                }
                let val: u64 = cnt.iter().map(|c| c[0].max(c[1])).sum();
                best = best.max(val);
            }
        }
        Ratio::new(best, total)
    }

    #[test]
    fn xor_constant_messages_give_half() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        assert_eq!(best(&f, 0, 0), Ratio::new(1, 2));
    }

    #[test]
    fn xor_one_bit_each_is_exact() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        assert_eq!(best(&f, 1, 1), Ratio::new(1, 1));
    }

    #[test]
    fn equality_one_bit_a_constant_b() {
        // With b constant the prediction is a function of x alone; every such
        // function matches the equality predicate on exactly half the inputs.
        // (Exhaustive enumeration confirms 1/2.)
        let f = make_family(&FamilySpec::Equality { p: 1, q: 0 }).unwrap();
        assert_eq!(oracle_best(&f, 1, 0), Ratio::new(1, 2));
        assert_eq!(best(&f, 1, 0), Ratio::new(1, 2));
    }

    #[test]
    fn matches_oracle_on_random_predicates() {
        for seed in 0..12 {
            let f = random_predicate(1, 1, 1, seed).unwrap();
            for (u, v) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                assert_eq!(best(&f, u, v), oracle_best(&f, u, v), "seed {seed} ({u},{v})");
            }
        }
    }

    #[test]
    fn agreement_one_iff_feasible() {
        for seed in 20..40 {
            let f = random_predicate(1, 1, 1, seed).unwrap();
            for (u, v) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)] {
                let (res, _) = feasible(&f, u, v, &SearchBudget::unlimited()).unwrap();
                let exact = best(&f, u, v) == Ratio::new(1, 1);
                assert_eq!(
                    matches!(res, Feasibility::Feasible(_)),
                    exact,
                    "seed {seed} ({u},{v})"
                );
            }
        }
    }

    #[test]
    fn monotone_in_widths() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        let mut prev = Ratio::new(0u64, 1u64);
        for m in 0..3 {
            let val = best(&f, m, m);
            assert!(val >= prev);
            prev = val;
        }
    }

    #[test]
    fn guard_trips_without_override() {
        let f = random_predicate(2, 3, 2, 0).unwrap();
        let err = best_agreement(&f, 3, 2, &SearchBudget::unlimited(), &Default::default());
        assert!(err.is_err());
        let guard = DistributionalGuard { override_guard: true, ..Default::default() };
        let ok = best_agreement(&f, 1, 0, &SearchBudget::with_nodes(500), &guard);
        assert!(ok.is_ok());
    }

    #[test]
    fn budget_exhaustion_flags_lower_bound() {
        let f = random_predicate(2, 2, 1, 5).unwrap();
        let budget = SearchBudget::with_nodes(10);
        let guard = DistributionalGuard { override_guard: true, ..Default::default() };
        let out = best_agreement(&f, 2, 2, &budget, &guard).unwrap();
        assert!(!out.optimal);
        assert_eq!(agreement(&f, &out.certificate).unwrap(), out.value);
    }
}
