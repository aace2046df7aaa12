//! Acceptance suite: one test per criterion, each printing a PASS line on
//! success (run with `--nocapture` to see them). The exhaustive k = 2
//! automaton check is `#[ignore]`d by default; include it with
//! `cargo test -p decomp-core --test acceptance -- --include-ignored`.

use decomp_core::automata::{
    asap_schedule, ca_run_config, extract_decomposition, min_state_bound, Configuration,
    IndexingCa, TriangleCircuit, INDEXING_CA_TIME_FACTOR,
};
use decomp_core::f2poly::protocol::{message_size, protocol_alice, protocol_bob, protocol_referee};
use decomp_core::f2poly::{
    anf_from_tt, degree_split, embed_indexing, xor_indexing_eval, xor_substitute, xz_degree_split,
};
use decomp_core::solver::{
    best_agreement, counting_lower_bound, counting_lower_bound_approx, feasible, Feasibility,
    SearchBudget, Side,
};
use decomp_core::{
    agreement, bit_at, exact_dc, make_family, random_predicate, upper_bound_slice,
    upper_bound_split, verify_certificate, FamilySpec, SolveStatus, TernaryFunction,
};
use num_rational::Ratio;
use rand_core::{RngCore, SeedableRng};
use std::time::Instant;

type Rng = rand_chacha::ChaCha8Rng;

/// Independent feasibility oracle: enumerate every (a, b, t) outright.
fn oracle_feasible(f: &TernaryFunction, u: u32, v: u32) -> bool {
    let na = 1usize << (f.p() + f.q());
    let nb = 1usize << (f.q() + f.r());
    let ca = 1u64 << u;
    let cb = 1u64 << v;
    let nt = 1usize << (u + v);
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
            'next_t: for et in 0..2u64.pow(nt as u32) {
                for (i, want) in f.table().iter().enumerate() {
                    let t = f.triple_of(i);
                    let alpha = a[((t.x << f.q()) | t.y) as usize];
                    let beta = b[((t.y << f.r()) | t.z) as usize];
                    if (et >> ((alpha << v) | beta)) & 1 != *want {
                        continue 'next_t;
                    }
                }
                return true;
            }
        }
    }
    false
}

/// Oracle decomposition complexity at tiny shapes: exhaustive for
/// u + v <= 2, settled by the always-feasible split at m = n beyond.
fn oracle_dc(f: &TernaryFunction) -> u32 {
    let n = f.input_bits();
    for m in 0..=2u32.min(n.saturating_sub(1)) {
        for u in 0..=m {
            if oracle_feasible(f, u, m - u) {
                return m;
            }
        }
    }
    n
}

fn predicate_from_bits(p: u32, q: u32, r: u32, bits: u64) -> TernaryFunction {
    let n = p + q + r;
    let table: Vec<u64> = (0..1usize << n).map(|i| (bits >> i) & 1).collect();
    TernaryFunction::new(p, q, r, 1, table).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence_at_111() {
    let start = Instant::now();
    for bits in 0..256u64 {
        let f = predicate_from_bits(1, 1, 1, bits);
        let got = exact_dc(&f, &SearchBudget::unlimited()).unwrap();
        assert_eq!(got.status, SolveStatus::Exact);
        assert_eq!(got.value(), Some(oracle_dc(&f)), "predicate {bits:#010b}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!("criterion 1: PASS — exact_dc matches the brute-force oracle on all 256 predicates at (1,1,1) in {elapsed:?}");
}

#[test]
fn criterion_02_xor_complexity_two() {
    for (p, q, r) in [(1u32, 1, 1), (2, 2, 2)] {
        let f = make_family(&FamilySpec::Xor { p, q, r }).unwrap();
        // m <= 1 refuted exhaustively.
        for (u, v) in [(0u32, 0u32), (1, 0), (0, 1)] {
            let (res, _) = feasible(&f, u, v, &SearchBudget::unlimited()).unwrap();
            assert!(matches!(res, Feasibility::Infeasible), "({p},{q},{r}) at ({u},{v})");
        }
        let res = exact_dc(&f, &SearchBudget::unlimited()).unwrap();
        assert_eq!(res.value(), Some(2), "({p},{q},{r})");
        assert!(verify_certificate(&f, res.certificate.as_ref().unwrap()).unwrap());
    }
    println!("criterion 2: PASS — dc(xor) = 2 at (1,1,1) and (2,2,2) with verified certificates");
}

#[test]
fn criterion_03_theorem1_upper_bounds() {
    let (p, q, r) = (2u32, 3, 2);
    for seed in 0..100u64 {
        let f = random_predicate(p, q, r, seed).unwrap();
        for j in 0..=q {
            let cert = upper_bound_split(&f, j).unwrap();
            assert_eq!(cert.size(), p + q + r, "seed {seed}, j = {j}");
            assert!(verify_certificate(&f, &cert).unwrap(), "seed {seed}, j = {j}");
        }
        let right = upper_bound_slice(&f, Side::Right).unwrap();
        assert_eq!(right.size(), (1 << r) + r, "seed {seed}");
        assert!(verify_certificate(&f, &right).unwrap(), "seed {seed}");
        let left = upper_bound_slice(&f, Side::Left).unwrap();
        assert_eq!(left.size(), (1 << p) + p, "seed {seed}");
        assert!(verify_certificate(&f, &left).unwrap(), "seed {seed}");
    }
    println!("criterion 3: PASS — split certificates have size p+q+r and slice certificates size 2^r+r on 100 seeded predicates at (2,3,2)");
}

#[test]
fn criterion_04_indexing_k1() {
    let f = make_family(&FamilySpec::Indexing { k: 1 }).unwrap();
    // Lower bound 2 = 2^k: every split with u + v <= 1 is refuted.
    for (u, v) in [(0u32, 0u32), (1, 0), (0, 1)] {
        let (res, _) = feasible(&f, u, v, &SearchBudget::unlimited()).unwrap();
        assert!(matches!(res, Feasibility::Infeasible), "({u},{v})");
    }
    let slice = upper_bound_slice(&f, Side::Right).unwrap();
    assert_eq!(slice.size(), 3);
    assert!(verify_certificate(&f, &slice).unwrap());
    // Exact value within budget, or the bracket [2, 3].
    let budget = SearchBudget {
        max_time: Some(std::time::Duration::from_secs(30 * 60)),
        allow_unknown: true,
        ..Default::default()
    };
    let res = exact_dc(&f, &budget).unwrap();
    match res.status {
        SolveStatus::Exact => {
            let dc = res.value().unwrap();
            assert!((2..=3).contains(&dc), "dc = {dc}");
            assert!(verify_certificate(&f, res.certificate.as_ref().unwrap()).unwrap());
            println!("criterion 4: PASS — m <= 1 refuted, slice gives 3, exact dc(T_1) = {dc}");
        }
        _ => {
            assert_eq!((res.lower, res.upper.min(3)), (2, 3));
            println!("criterion 4: PASS — m <= 1 refuted, slice gives 3, bracket [2,3] under budget");
        }
    }
}

#[test]
fn criterion_05_counting_calculator() {
    let report = counting_lower_bound(8, 16, 8).unwrap();
    assert_eq!(report.m, Some(31), "n - 1 for n = 32");
    assert!(report.decision_consistent(), "terms must re-sum to the stored totals");
    let at_m = report.at_m.as_ref().unwrap();
    assert_eq!(at_m.resummed(), at_m.total_value());
    assert_eq!(report.adjacent.resummed(), report.adjacent.total_value());
    println!("criterion 5: PASS — counting_lower_bound(8,16,8) = 31 with exactly re-summing terms");
}

#[test]
fn criterion_06_approximate_counting() {
    // Independent f64 oracle with margin reasoning: the decision gaps at
    // m = 23 and 24 are ~1e7 wide, dwarfing f64 error on (1-H(1/4))·2^32.
    let h = |e: f64| -e * e.log2() - (1.0 - e) * (1.0 - e).log2();
    let rhs = (1.0 - h(0.25)) * 2f64.powi(32);
    let lhs = |m: f64| m.log2().ceil().max(0.0) + m * 2f64.powi(25) + 2f64.powf(m);
    assert!(lhs(23.0) < rhs - 1e6 && lhs(24.0) > rhs + 1e6);

    let approx = counting_lower_bound_approx(8, 16, 8, Ratio::new(1, 4)).unwrap();
    assert_eq!(approx.m, Some(23));
    assert!(approx.decision_consistent());

    let zero = counting_lower_bound_approx(8, 16, 8, Ratio::new(0, 1)).unwrap();
    let exact = counting_lower_bound(8, 16, 8).unwrap();
    assert_eq!(zero.m, exact.m);
    assert_eq!(zero.rhs(), exact.rhs());
    println!("criterion 6: PASS — approx bound is 23 at eps = 1/4 and collapses to the exact bound at eps = 0");
}

#[test]
fn criterion_07_protocol_exactness_and_sizes() {
    // Referee equals y(x ⊕ z): exhaustive over (x, z) for k <= 4 with 200
    // seeded tables each, 10^4 sampled triples at k = 5 and 6.
    let mut rng = Rng::seed_from_u64(0xD15C0);
    for k in 1..=4u32 {
        for _ in 0..200 {
            let y: Vec<u8> = (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect();
            for x in 0..1u64 << k {
                for z in 0..1u64 << k {
                    let a = protocol_alice(x, &y, k).unwrap();
                    let b = protocol_bob(z, &y, k).unwrap();
                    assert_eq!(
                        protocol_referee(&a, &b, k).unwrap(),
                        y[(x ^ z) as usize],
                        "k={k} x={x} z={z}"
                    );
                }
            }
        }
    }
    for k in [5u32, 6] {
        for _ in 0..10_000 {
            let y: Vec<u8> = (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect();
            let x = rng.next_u64() & ((1 << k) - 1);
            let z = rng.next_u64() & ((1 << k) - 1);
            let a = protocol_alice(x, &y, k).unwrap();
            let b = protocol_bob(z, &y, k).unwrap();
            assert_eq!(protocol_referee(&a, &b, k).unwrap(), y[(x ^ z) as usize]);
        }
    }

    // Emitted bit-lengths equal message_size(k) for k <= 10.
    for k in 1..=10u32 {
        let y: Vec<u8> = (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect();
        let a = protocol_alice(0, &y, k).unwrap();
        let b = protocol_bob(0, &y, k).unwrap();
        let (wa, wb) = message_size(k);
        assert_eq!(a.to_bits().len() as u128, wa, "k = {k}");
        assert_eq!(b.to_bits().len() as u128, wb, "k = {k}");
    }

    // Formula-level size behavior.
    let ratio = |k: u32| {
        let (a, b) = message_size(k);
        ((a + b) as f64).log2() / k as f64
    };
    assert!(ratio(30) < 0.95, "ratio at k = 30 is {}", ratio(30));

    let mut rising = Vec::new();
    for k in 12..60u32 {
        if ratio(k + 1) >= ratio(k) {
            rising.push((k + 1, ratio(k), ratio(k + 1)));
        }
    }
    assert!(
        rising.is_empty(),
        "log2(|A|+|B|)/k is not strictly decreasing on k = 12..60: rises into k = {:?}",
        rising.iter().map(|(k, _, _)| *k).collect::<Vec<_>>()
    );
    println!("criterion 7: PASS — protocol exact, sizes match, ratio < 0.95 at k = 30 and strictly decreasing on 12..60");
}

#[test]
fn criterion_08_embedding() {
    let t1 = make_family(&FamilySpec::Indexing { k: 1 }).unwrap();
    for x in 0..2u64 {
        for ym in 0..16u64 {
            let y: Vec<u8> = (0..4).map(|i| bit_at(ym, 4, i) as u8).collect();
            for z in 0..2u64 {
                let want = t1.eval(decomp_core::InputTriple::new(x, ym, z)).unwrap() as u8;
                let (x1, y1, z1) = embed_indexing(1, x, &y, z).unwrap();
                assert_eq!(xor_indexing_eval(2, x1, &y1, z1).unwrap(), want);
            }
        }
    }
    let t2 = make_family(&FamilySpec::Indexing { k: 2 }).unwrap();
    let mut rng = Rng::seed_from_u64(88);
    for _ in 0..1000 {
        let x = rng.next_u64() & 3;
        let z = rng.next_u64() & 3;
        let ym = rng.next_u64() & 0xffff;
        let y: Vec<u8> = (0..16).map(|i| bit_at(ym, 16, i) as u8).collect();
        let want = t2.eval(decomp_core::InputTriple::new(x, ym, z)).unwrap() as u8;
        let (x1, y1, z1) = embed_indexing(2, x, &y, z).unwrap();
        assert_eq!(xor_indexing_eval(4, x1, &y1, z1).unwrap(), want);
    }
    println!("criterion 8: PASS — embedding matches indexing on all 64 inputs at k = 1 and 1000 samples at k = 2");
}

#[test]
fn criterion_09_mobius_and_split_invariants() {
    let mut rng = Rng::seed_from_u64(0x5EED);
    for k in 1..=10u32 {
        for _ in 0..1000 {
            let table: Vec<u8> = (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect();
            let poly = anf_from_tt(&table).unwrap();
            assert_eq!(poly.truth_table(), table, "involution at k = {k}");
            let d = rng.next_u64() as u32 % (k + 1);
            let (low, high) = degree_split(&poly, d);
            assert!(low.monomials().all(|m| m.count_ones() <= d));
            assert!(high.monomials().all(|m| m.count_ones() > d));
            assert_eq!(low.len() + high.len(), poly.len());
            assert!(low.monomials().all(|m| poly.contains(m)));
            assert!(high.monomials().all(|m| poly.contains(m)));
        }
    }
    // The xz split never trips its precondition on substituted low parts.
    for k in 1..=12u32 {
        let samples = if k <= 10 { 400 } else { 150 };
        for _ in 0..samples {
            let table: Vec<u8> = (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect();
            let poly = anf_from_tt(&table).unwrap();
            let (low, _) = degree_split(&poly, 2 * k / 3);
            let sub = xor_substitute(&low);
            assert!(xz_degree_split(&sub, k / 3).is_ok(), "precondition fired at k = {k}");
        }
    }
    println!("criterion 9: PASS — Möbius involution and split invariants on 1000 polynomials per k <= 10; xz precondition quiet through k = 12");
}

#[test]
fn criterion_10_triangle_extraction() {
    let k = 2u32;
    let f_mid = 4u32;
    let n = 2 * k + f_mid;
    let (_, t_star) = asap_schedule(n);
    for delta in [0u32, 1] {
        for seed in 0..50u64 {
            let circuit = TriangleCircuit::seeded(n, t_star + delta, 3, 2, seed).unwrap();
            let ex = extract_decomposition(&circuit, k, f_mid, delta).unwrap();
            assert!(
                verify_certificate(&ex.function, &ex.certificate).unwrap(),
                "delta {delta} seed {seed}"
            );
            let bound = (2 * k + 2 * delta + 1) * 2; // ceil(log2 3) = 2
            assert!(
                ex.certificate.size() <= bound,
                "delta {delta} seed {seed}: {} > {bound}",
                ex.certificate.size()
            );
        }
    }
    println!("criterion 10: PASS — 50 seeded circuits per delta in {{0,1}} extract verified certificates within (2k+2Δ+1)·⌈log2 σ⌉");
}

#[test]
fn criterion_11_indexing_ca_k1_exhaustive() {
    const { assert!(INDEXING_CA_TIME_FACTOR <= 8) };
    let ca = IndexingCa::build(1).unwrap();
    let rule = ca.rule();
    // Neutral stability.
    assert_eq!(rule.apply(rule.neutral(), rule.neutral(), rule.neutral()), rule.neutral());
    let quiet = Configuration { offset: 0, cells: vec![rule.neutral(); 16] };
    let trace = ca_run_config(rule, quiet, 100).unwrap();
    assert!(trace.rows.iter().all(|r| r.cells.iter().all(|&s| s == rule.neutral())));

    let bound = ca.step_bound();
    for x in 0..2u64 {
        for ym in 0..16u64 {
            let y: Vec<u8> = (0..4).map(|i| bit_at(ym, 4, i) as u8).collect();
            for z in 0..2u64 {
                let (got, steps) = ca.run(x, &y, z).unwrap();
                assert_eq!(got, y[(x * 2 + z) as usize], "x={x} ym={ym:04b} z={z}");
                assert!(steps <= bound);
            }
        }
    }
    println!(
        "criterion 11 (k=1): PASS — exhaustive 64 inputs within {INDEXING_CA_TIME_FACTOR}·n steps, neutral stability holds"
    );
}

#[test]
#[ignore = "2^20 automaton runs; include with --include-ignored (use --release for speed)"]
fn criterion_11_indexing_ca_k2_exhaustive() {
    use rayon::prelude::*;
    let start = Instant::now();
    let ca = IndexingCa::build(2).unwrap();
    let bound = ca.step_bound();
    let failures: u64 = (0..1u64 << 16)
        .into_par_iter()
        .map(|ym| {
            let y: Vec<u8> = (0..16).map(|i| bit_at(ym, 16, i) as u8).collect();
            let mut bad = 0u64;
            for x in 0..4u64 {
                for z in 0..4u64 {
                    match ca.run(x, &y, z) {
                        Ok((got, steps)) if steps <= bound => {
                            if got != y[(x * 4 + z) as usize] {
                                bad += 1;
                            }
                        }
                        _ => bad += 1,
                    }
                }
            }
            bad
        })
        .sum();
    let elapsed = start.elapsed();
    assert_eq!(failures, 0);
    assert!(elapsed.as_secs() < 30 * 60, "took {elapsed:?}");
    println!(
        "criterion 11 (k=2): PASS — all 2^20 inputs correct within {INDEXING_CA_TIME_FACTOR}·n steps in {elapsed:?}"
    );
}

#[test]
fn criterion_12_min_state_bound() {
    assert_eq!(min_state_bound(4, 0).unwrap().sigma, 4);
    assert_eq!(min_state_bound(6, 0).unwrap().sigma, 31);
    for k in 1..=8u32 {
        let mut prev = u64::MAX;
        for delta in 0..8u32 {
            let sigma = min_state_bound(k, delta).unwrap().sigma;
            assert!(sigma <= prev, "k = {k}, delta = {delta}");
            prev = sigma;
        }
    }
    println!("criterion 12: PASS — min_state_bound(4,0) = 4, (6,0) = 31, monotone non-increasing in delta");
}

#[test]
fn criterion_13_distributional() {
    let xor = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
    let out = best_agreement(&xor, 0, 0, &SearchBudget::unlimited(), &Default::default()).unwrap();
    assert_eq!(out.value, Ratio::new(1, 2));

    // Monotone in (u, v) and exact iff feasible, over all 256 predicates.
    for bits in 0..256u64 {
        let f = predicate_from_bits(1, 1, 1, bits);
        let mut grid = [[Ratio::new(0u64, 1u64); 3]; 3];
        for u in 0..3u32 {
            for v in 0..3u32 {
                let out =
                    best_agreement(&f, u, v, &SearchBudget::unlimited(), &Default::default())
                        .unwrap();
                assert!(out.optimal);
                assert_eq!(agreement(&f, &out.certificate).unwrap(), out.value);
                grid[u as usize][v as usize] = out.value;
                let (res, _) = feasible(&f, u, v, &SearchBudget::unlimited()).unwrap();
                assert_eq!(
                    matches!(res, Feasibility::Feasible(_)),
                    out.value == Ratio::new(1, 1),
                    "predicate {bits:#010b} at ({u},{v})"
                );
            }
        }
        for u in 0..3 {
            for v in 0..3 {
                if u + 1 < 3 {
                    assert!(grid[u][v] <= grid[u + 1][v], "predicate {bits:#010b}");
                }
                if v + 1 < 3 {
                    assert!(grid[u][v] <= grid[u][v + 1], "predicate {bits:#010b}");
                }
            }
        }
    }
    println!("criterion 13: PASS — best_agreement(xor,0,0) = 1/2; monotone in (u,v) and exact iff feasible on all 256 predicates");
}
