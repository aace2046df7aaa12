//! Exact big-integer calculators for the counting lower bound, its
//! ε-approximate variant, and the pair-counting bound for the indexing
//! predicate.
//!
//! Everything here is exact: the binary entropy factor `1 - H(ε)` enters as a
//! certified rational lower bound computed with directed dyadic rounding, so
//! a reported bound never overstates what the inequality proves.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Counting,
    CountingApprox,
    IndexingFormula,
}

/// One evaluated side of the inequality at a specific `m`; every value is an
/// exact decimal integer string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityTerms {
    pub m: u64,
    /// `(name, decimal value)` pairs, in formula order.
    pub terms: Vec<(String, String)>,
    /// Decimal value of the sum of the terms.
    pub total: String,
}

impl InequalityTerms {
    pub fn total_value(&self) -> BigUint {
        self.total.parse().expect("total is a decimal integer")
    }

    /// Re-sums the stored terms; the report invariant is that this equals
    /// [`InequalityTerms::total_value`].
    pub fn resummed(&self) -> BigUint {
        self.terms
            .iter()
            .map(|(_, v)| v.parse::<BigUint>().expect("term is a decimal integer"))
            .sum()
    }
}

/// Evaluated lower-bound report. For the counting kinds, `m` is the largest
/// value with `lhs(m) < rhs` (so some predicate has complexity greater than
/// `m`); for the indexing formula it is the smallest value with
/// `lhs(m) >= rhs` (the proven lower bound on `u + v`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// ε as an exact reduced fraction, counting-approx only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<(u64, u64)>,
    /// The resulting bound; `None` when the inequality is vacuous.
    pub m: Option<u64>,
    /// True when no `m` satisfies the defining inequality.
    pub vacuous: bool,
    /// Terms evaluated at `m` (absent when vacuous).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_m: Option<InequalityTerms>,
    /// Terms at the adjacent `m` that witnesses tightness: `m + 1` for the
    /// counting kinds (or `0` when vacuous), `m - 1` for the indexing formula.
    pub adjacent: InequalityTerms,
    /// Right-hand side as an exact fraction `rhs_num / rhs_den` (the
    /// certified lower bound on `(1 - H(ε))·2^n` for the approx kind).
    pub rhs_num: String,
    pub rhs_den: String,
}

impl BoundReport {
    pub fn rhs(&self) -> (BigUint, BigUint) {
        (
            self.rhs_num.parse().expect("rhs_num decimal"),
            self.rhs_den.parse().expect("rhs_den decimal"),
        )
    }

    /// Checks that the stored terms reproduce the reported decision.
    pub fn decision_consistent(&self) -> bool {
        let (num, den) = self.rhs();
        let below = |t: &InequalityTerms| t.resummed() == t.total_value() && t.total_value() * &den < num;
        match self.kind {
            BoundKind::Counting | BoundKind::CountingApprox => match (&self.at_m, self.vacuous) {
                (Some(at_m), false) => below(at_m) && !below(&self.adjacent),
                (None, true) => !below(&self.adjacent),
                _ => false,
            },
            BoundKind::IndexingFormula => match (&self.at_m, self.vacuous) {
                (Some(at_m), false) => !below(at_m) && below(&self.adjacent),
                _ => false,
            },
        }
    }
}

fn ceil_log2(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

fn counting_terms(p: u32, q: u32, r: u32, m: u64) -> InequalityTerms {
    let log_term = BigUint::from(ceil_log2(m));
    let a_term = BigUint::from(m) << (p + q);
    let b_term = BigUint::from(m) << (q + r);
    let t_term = BigUint::one() << m;
    let total = &log_term + &a_term + &b_term + &t_term;
    InequalityTerms {
        m,
        terms: vec![
            ("ceil_log2_m".into(), log_term.to_string()),
            ("m_2pq".into(), a_term.to_string()),
            ("m_2qr".into(), b_term.to_string()),
            ("2_m".into(), t_term.to_string()),
        ],
        total: total.to_string(),
    }
}

/// Ceiling on `p + q + r` accepted by the calculators; they are exact, so the
/// only cost of large shapes is the `O(n)` bigint loop.
const MAX_CALC_BITS: u32 = 4096;

fn counting_report_against(
    p: u32,
    q: u32,
    r: u32,
    rhs_num: BigUint,
    rhs_den: BigUint,
    kind: BoundKind,
    epsilon: Option<(u64, u64)>,
) -> Result<BoundReport> {
    let n = p
        .checked_add(q)
        .and_then(|t| t.checked_add(r))
        .filter(|&n| n <= MAX_CALC_BITS)
        .ok_or(Error::SizeCeiling { got: u32::MAX, ceiling: MAX_CALC_BITS })?;
    let below =
        |terms: &InequalityTerms| terms.total_value() * &rhs_den < rhs_num;

    let at_zero = counting_terms(p, q, r, 0);
    if !below(&at_zero) {
        return Ok(BoundReport {
            kind,
            p: Some(p),
            q: Some(q),
            r: Some(r),
            k: None,
            epsilon,
            m: None,
            vacuous: true,
            at_m: None,
            adjacent: at_zero,
            rhs_num: rhs_num.to_string(),
            rhs_den: rhs_den.to_string(),
        });
    }
    // lhs(m) >= 2^m, so the loop terminates by m = n (and well before it
    // whenever the rhs is below 2^n).
    let mut best = at_zero;
    for m in 1..=(n as u64 + 1) {
        let terms = counting_terms(p, q, r, m);
        if !below(&terms) {
            return Ok(BoundReport {
                kind,
                p: Some(p),
                q: Some(q),
                r: Some(r),
                k: None,
                epsilon,
                m: Some(best.m),
                vacuous: false,
                at_m: Some(best),
                adjacent: terms,
                rhs_num: rhs_num.to_string(),
                rhs_den: rhs_den.to_string(),
            });
        }
        best = terms;
    }
    unreachable!("lhs grows past any rhs <= 2^n by m = n + 1")
}

/// Largest `m` with `⌈log2 m⌉ + m·2^(p+q) + m·2^(q+r) + 2^m < 2^n`: some
/// predicate on `B^p × B^q × B^r` has decomposition complexity greater
/// than `m`.
pub fn counting_lower_bound(p: u32, q: u32, r: u32) -> Result<BoundReport> {
    let n = p
        .checked_add(q)
        .and_then(|t| t.checked_add(r))
        .filter(|&n| n <= MAX_CALC_BITS)
        .ok_or(Error::SizeCeiling { got: u32::MAX, ceiling: MAX_CALC_BITS })?;
    counting_report_against(p, q, r, BigUint::one() << n, BigUint::one(), BoundKind::Counting, None)
}

/// Dyadic interval for `log2(c)`: returns `(lo, hi)` with
/// `lo/2^t <= log2(c) <= hi/2^t`, computed by the squaring recurrence with
/// directed rounding at precision `P = t + 64`.
fn log2_dyadic(c: u64, t: u32) -> (BigUint, BigUint) {
    assert!(c >= 1);
    let e = 63 - c.leading_zeros(); // floor(log2 c)
    let p_bits = t + 64;
    let run = |round_up: bool| -> BigUint {
        let mut x = BigUint::from(c) << (p_bits - e);
        let one = BigUint::one() << p_bits;
        let two = &one << 1usize;
        let mut frac = BigUint::zero();
        for _ in 0..t {
            let mut sq = &x * &x; // scale 2^(2P)
            frac <<= 1usize;
            if (&sq >> p_bits) >= two {
                frac |= BigUint::one();
                sq >>= 1usize;
            }
            x = if round_up {
                (&sq + (&one - BigUint::one())) >> p_bits
            } else {
                sq >> p_bits
            };
        }
        frac
    };
    let lo = (BigUint::from(e) << t) + run(false);
    let hi = (BigUint::from(e) << t) + run(true);
    (lo, hi)
}

/// Precision (fractional bits) used for the certified entropy bound.
const ENTROPY_PREC: u32 = 192;

/// Certified rational lower bound on `(1 - H(a/b))` for `0 <= a/b < 1/2`,
/// returned as `(num, den)` with `num/den <= 1 - H(a/b)` and `num >= 0`.
fn one_minus_entropy_lower(a: u64, b: u64) -> Result<(BigUint, BigUint)> {
    if b == 0 || 2 * a >= b {
        return Err(Error::EpsilonRange(format!("{a}/{b}")));
    }
    if a == 0 {
        return Ok((BigUint::one(), BigUint::one()));
    }
    let t = ENTROPY_PREC;
    // 1 - H(a/b) = [b + a·log2(a) + (b-a)·log2(b-a) - b·log2(b)] / b,
    // bounded below with lo for the added logs and hi for the subtracted one.
    let (log_a_lo, _) = log2_dyadic(a, t);
    let (log_ba_lo, _) = log2_dyadic(b - a, t);
    let (_, log_b_hi) = log2_dyadic(b, t);
    let pos = (BigInt::from(b) << t)
        + BigInt::from(a) * BigInt::from(log_a_lo)
        + BigInt::from(b - a) * BigInt::from(log_ba_lo);
    let neg = BigInt::from(b) * BigInt::from(log_b_hi);
    let num = pos - neg;
    if num.is_negative() || num.is_zero() {
        // Cannot happen at this precision for ε strictly below 1/2 with
        // 64-bit numerator and denominator, but stay sound regardless.
        return Err(Error::EpsilonRange(format!(
            "certified bound for {a}/{b} collapsed to zero"
        )));
    }
    let den = BigUint::from(b) << t;
    Ok((num.to_biguint().expect("positive"), den))
}

/// Approximate-counting variant: largest `m` with
/// `⌈log2 m⌉ + m·2^(p+q) + m·2^(q+r) + 2^m < (1 - H(ε))·2^n`, the right side
/// replaced by its certified rational lower bound so the report stays sound.
pub fn counting_lower_bound_approx(
    p: u32,
    q: u32,
    r: u32,
    epsilon: Ratio<u64>,
) -> Result<BoundReport> {
    let n = p
        .checked_add(q)
        .and_then(|t| t.checked_add(r))
        .filter(|&n| n <= MAX_CALC_BITS)
        .ok_or(Error::SizeCeiling { got: u32::MAX, ceiling: MAX_CALC_BITS })?;
    let (a, b) = (*epsilon.numer(), *epsilon.denom());
    let (num, den) = one_minus_entropy_lower(a, b)?;
    counting_report_against(
        p,
        q,
        r,
        num << n,
        den,
        BoundKind::CountingApprox,
        Some((a, b)),
    )
}

/// Pair-counting bound for the indexing predicate: `u + v >= 2^k`, from
/// `(u+v)·2^k >= 2^(2k)`.
pub fn indexing_lower_bound(k: u32) -> Result<BoundReport> {
    if k == 0 || k > 62 {
        return Err(Error::BadFamily(format!("indexing bound needs 1 <= k <= 62, got {k}")));
    }
    let m = 1u64 << k;
    let pairs = |m: u64| {
        let value = BigUint::from(m) << k;
        InequalityTerms {
            m,
            terms: vec![("m_2k".into(), value.to_string())],
            total: value.to_string(),
        }
    };
    Ok(BoundReport {
        kind: BoundKind::IndexingFormula,
        p: None,
        q: None,
        r: None,
        k: Some(k),
        epsilon: None,
        m: Some(m),
        vacuous: false,
        at_m: Some(pairs(m)),
        adjacent: pairs(m - 1),
        rhs_num: (BigUint::one() << (2 * k)).to_string(),
        rhs_den: BigUint::one().to_string(),
    })
}
