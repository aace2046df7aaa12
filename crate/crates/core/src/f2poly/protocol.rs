//! The three-message simultaneous protocol for the xor-indexing predicate.
//!
//! Both senders know the table of `y`; its ANF is split at degree
//! `d = ⌊2k/3⌋`. The high part travels verbatim in message A. For the low
//! part, `X_i ⊕ Z_i` is substituted and the result is split again by per-side
//! degree `f = ⌊k/3⌋`: A carries the Z-polynomial of the Z-low part with
//! `X = x` fixed, B carries the X-polynomial of the X-low part with `Z = z`
//! fixed. The referee adds the three evaluations over GF(2).
//!
//! All coefficient lists are ordered by ascending monomial mask.

use super::{anf_from_tt, degree_split, xor_substitute, xz_degree_split, AnfPolynomial};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Degree thresholds `(d, f)` used at size `k`.
pub fn thresholds(k: u32) -> (u32, u32) {
    (2 * k / 3, k / 3)
}

fn binomial(n: u32, j: u32) -> u128 {
    if j > n {
        return 0;
    }
    let j = j.min(n - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact bit sizes `(|A|, |B|)` of the two messages at size `k`:
/// `|A| = k + Σ_{j>d} C(k,j) + Σ_{j<=f} C(k,j)` and `|B| = k + Σ_{j<=f} C(k,j)`.
pub fn message_size(k: u32) -> (u128, u128) {
    let (d, f) = thresholds(k);
    let high: u128 = (d + 1..=k).map(|j| binomial(k, j)).sum();
    let low: u128 = (0..=f).map(|j| binomial(k, j)).sum();
    (k as u128 + high + low, k as u128 + low)
}

fn masks_by(k: u32, keep: impl Fn(u32) -> bool) -> Vec<u32> {
    (0..1u32 << k).filter(|m| keep(m.count_ones())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolMessageA {
    pub k: u32,
    /// Alice's own input, k bits.
    pub x: u64,
    /// Coefficients of y_high, one bit per mask of degree > d, mask-ascending.
    pub high_coeffs: Vec<u8>,
    /// Coefficients of `Z ↦ ỹ_z-low(x, Z)`, one bit per mask of degree <= f.
    pub zpoly_coeffs: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolMessageB {
    pub k: u32,
    /// Bob's own input, k bits.
    pub z: u64,
    /// Coefficients of `X ↦ ỹ_x-low(X, z)`, one bit per mask of degree <= f.
    pub xpoly_coeffs: Vec<u8>,
}

fn check_point(k: u32, name: &str, value: u64) -> Result<()> {
    if value >> k != 0 {
        return Err(Error::ProtocolMessage(format!("{name} = {value} exceeds {k} bits")));
    }
    Ok(())
}

fn low_parts(y_table: &[u8], k: u32) -> Result<(AnfPolynomial, super::Anf2kPolynomial, super::Anf2kPolynomial)> {
    if k == 0 || k > 24 {
        return Err(Error::PolyShape(format!("protocol supports 1 <= k <= 24, got {k}")));
    }
    if y_table.len() != 1usize << k {
        return Err(Error::TableLength { got: y_table.len(), want: 1usize << k });
    }
    let (d, f) = thresholds(k);
    let poly = anf_from_tt(y_table)?;
    let (low, high) = degree_split(&poly, d);
    let sub = xor_substitute(&low);
    let (xlow, zlow) = xz_degree_split(&sub, f)?;
    Ok((high, xlow, zlow))
}

/// Builds Alice's message from her input `x` and the shared `y` table.
pub fn protocol_alice(x: u64, y_table: &[u8], k: u32) -> Result<ProtocolMessageA> {
    check_point(k, "x", x)?;
    let (d, f) = thresholds(k);
    let (high, _, zlow) = low_parts(y_table, k)?;
    let r_a = zlow.fix_x(x as u32);
    Ok(ProtocolMessageA {
        k,
        x,
        high_coeffs: masks_by(k, |c| c > d).iter().map(|&m| u8::from(high.contains(m))).collect(),
        zpoly_coeffs: masks_by(k, |c| c <= f).iter().map(|&m| u8::from(r_a.contains(m))).collect(),
    })
}

/// Builds Bob's message from his input `z` and the shared `y` table.
pub fn protocol_bob(z: u64, y_table: &[u8], k: u32) -> Result<ProtocolMessageB> {
    check_point(k, "z", z)?;
    let (_, f) = thresholds(k);
    let (_, xlow, _) = low_parts(y_table, k)?;
    let r_b = xlow.fix_z(z as u32);
    Ok(ProtocolMessageB {
        k,
        z,
        xpoly_coeffs: masks_by(k, |c| c <= f).iter().map(|&m| u8::from(r_b.contains(m))).collect(),
    })
}

/// Referee output: `y_high(x ⊕ z) ⊕ R_A(z) ⊕ R_B(x)`, which equals
/// `y(x ⊕ z)` for every `x`, `z` and `y`.
pub fn protocol_referee(a: &ProtocolMessageA, b: &ProtocolMessageB, k: u32) -> Result<u8> {
    let (d, f) = thresholds(k);
    if a.k != k || b.k != k {
        return Err(Error::ProtocolMessage(format!(
            "message sizes declare k = {} and {}, referee expects {k}",
            a.k, b.k
        )));
    }
    check_point(k, "x", a.x)?;
    check_point(k, "z", b.z)?;
    let high_masks = masks_by(k, |c| c > d);
    let low_masks = masks_by(k, |c| c <= f);
    if a.high_coeffs.len() != high_masks.len() {
        return Err(Error::ProtocolMessage(format!(
            "high part has {} bits, want {}",
            a.high_coeffs.len(),
            high_masks.len()
        )));
    }
    if a.zpoly_coeffs.len() != low_masks.len() || b.xpoly_coeffs.len() != low_masks.len() {
        return Err(Error::ProtocolMessage(format!(
            "low parts have {} and {} bits, want {}",
            a.zpoly_coeffs.len(),
            b.xpoly_coeffs.len(),
            low_masks.len()
        )));
    }
    let any_bad = a
        .high_coeffs
        .iter()
        .chain(&a.zpoly_coeffs)
        .chain(&b.xpoly_coeffs)
        .any(|&c| c > 1);
    if any_bad {
        return Err(Error::ProtocolMessage("coefficient bits must be 0 or 1".into()));
    }

    let w = (a.x ^ b.z) as u32;
    let mut acc = 0u8;
    for (i, &m) in high_masks.iter().enumerate() {
        acc ^= a.high_coeffs[i] & u8::from(m & w == m);
    }
    for (i, &m) in low_masks.iter().enumerate() {
        acc ^= a.zpoly_coeffs[i] & u8::from(m & b.z as u32 == m);
        acc ^= b.xpoly_coeffs[i] & u8::from(m & a.x as u32 == m);
    }
    Ok(acc)
}

fn push_point_bits(out: &mut String, k: u32, value: u64) {
    for i in 0..k {
        out.push(if crate::function::bit_at(value, k, i) == 1 { '1' } else { '0' });
    }
}

impl ProtocolMessageA {
    /// Wire bits: `x` (big-endian), then high coefficients, then the
    /// Z-polynomial coefficients, mask-ascending.
    pub fn to_bits(&self) -> String {
        let mut out = String::new();
        push_point_bits(&mut out, self.k, self.x);
        out.extend(self.high_coeffs.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out.extend(self.zpoly_coeffs.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out
    }
}

impl ProtocolMessageB {
    /// Wire bits: `z` (big-endian), then the X-polynomial coefficients.
    pub fn to_bits(&self) -> String {
        let mut out = String::new();
        push_point_bits(&mut out, self.k, self.z);
        out.extend(self.xpoly_coeffs.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out
    }
}

/// A full protocol run rendered for the transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub k: u32,
    pub d: u32,
    pub f: u32,
    pub message_a: String,
    pub message_b: String,
    pub size_a: u64,
    pub size_b: u64,
    pub referee: u8,
}

/// Runs the protocol end to end and records the transcript.
pub fn run_protocol(x: u64, y_table: &[u8], z: u64, k: u32) -> Result<ProtocolTranscript> {
    let (d, f) = thresholds(k);
    let a = protocol_alice(x, y_table, k)?;
    let b = protocol_bob(z, y_table, k)?;
    let referee = protocol_referee(&a, &b, k)?;
    let message_a = a.to_bits();
    let message_b = b.to_bits();
    Ok(ProtocolTranscript {
        k,
        d,
        f,
        size_a: message_a.len() as u64,
        size_b: message_b.len() as u64,
        message_a,
        message_b,
        referee,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};

    fn random_table(k: u32, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<u8> {
        (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect()
    }

    /// y(x ⊕ z) straight from the table, string-position convention.
    fn direct(y: &[u8], x: u64, z: u64) -> u8 {
        y[(x ^ z) as usize]
    }

    #[test]
    fn referee_on_and_function() {
        // y = AND(u_1, u_2): table 0001 in point order; x = 01, z = 11 read
        // as integers 1 and 3, so the referee must output y(2) = 0.
        let y = [0u8, 0, 0, 1];
        let a = protocol_alice(1, &y, 2).unwrap();
        let b = protocol_bob(3, &y, 2).unwrap();
        assert_eq!(protocol_referee(&a, &b, 2).unwrap(), 0);
        assert_eq!(direct(&y, 1, 3), 0);
    }

    #[test]
    fn degenerate_k1_is_exhaustively_correct() {
        for ym in 0..4u8 {
            let y = [ym >> 1 & 1, ym & 1];
            for x in 0..2u64 {
                for z in 0..2u64 {
                    let a = protocol_alice(x, &y, 1).unwrap();
                    let b = protocol_bob(z, &y, 1).unwrap();
                    assert_eq!(protocol_referee(&a, &b, 1).unwrap(), direct(&y, x, z));
                }
            }
        }
    }

    #[test]
    fn exhaustive_pairs_random_tables_up_to_k4() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        for k in 1..=4u32 {
            for _ in 0..50 {
                let y = random_table(k, &mut rng);
                for x in 0..1u64 << k {
                    for z in 0..1u64 << k {
                        let a = protocol_alice(x, &y, k).unwrap();
                        let b = protocol_bob(z, &y, k).unwrap();
                        assert_eq!(
                            protocol_referee(&a, &b, k).unwrap(),
                            direct(&y, x, z),
                            "k={k} x={x} z={z}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_triples_at_k5_k6() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for k in [5u32, 6] {
            for _ in 0..200 {
                let y = random_table(k, &mut rng);
                let x = rng.next_u64() & ((1 << k) - 1);
                let z = rng.next_u64() & ((1 << k) - 1);
                let a = protocol_alice(x, &y, k).unwrap();
                let b = protocol_bob(z, &y, k).unwrap();
                assert_eq!(protocol_referee(&a, &b, k).unwrap(), direct(&y, x, z));
            }
        }
    }

    #[test]
    fn message_size_small_values() {
        assert_eq!(message_size(3), (8, 7));
        assert_eq!(message_size(6), (35, 28));
        assert_eq!(message_size(1), (3, 2));
    }

    #[test]
    fn emitted_bits_match_message_size() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in 1..=10u32 {
            let y = random_table(k, &mut rng);
            let t = run_protocol(0, &y, 0, k).unwrap();
            let (want_a, want_b) = message_size(k);
            assert_eq!(t.size_a as u128, want_a, "k = {k}");
            assert_eq!(t.size_b as u128, want_b, "k = {k}");
        }
    }

    #[test]
    fn ratio_below_095_at_k30() {
        let (a, b) = message_size(30);
        let ratio = ((a + b) as f64).log2() / 30.0;
        assert!(ratio < 0.95, "ratio at k = 30 is {ratio}");
    }

    #[test]
    fn malformed_messages_are_rejected() {
        let y = [0u8, 1, 1, 0];
        let a = protocol_alice(0, &y, 2).unwrap();
        let mut b = protocol_bob(0, &y, 2).unwrap();
        b.xpoly_coeffs.pop();
        assert!(protocol_referee(&a, &b, 2).is_err());
        let b = protocol_bob(0, &y, 2).unwrap();
        assert!(protocol_referee(&a, &b, 3).is_err());
    }

    #[test]
    fn transcript_layout() {
        let y = [0u8, 1, 1, 0, 1, 0, 0, 1];
        let t = run_protocol(0b101, &y, 0b011, 3).unwrap();
        assert_eq!(t.d, 2);
        assert_eq!(t.f, 1);
        assert!(t.message_a.starts_with("101"), "x travels verbatim");
        assert!(t.message_b.starts_with("011"), "z travels verbatim");
        assert_eq!(t.referee, direct(&y, 0b101, 0b011));
    }
}
