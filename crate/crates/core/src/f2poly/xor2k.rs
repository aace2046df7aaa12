//! Polynomials of `2k` variables obtained by substituting `X_i ⊕ Z_i` for
//! each variable, the X/Z degree split behind the three-message protocol,
//! and the embedding of the matrix-indexing predicate into xor-indexing.

use super::AnfPolynomial;
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Polynomial over variables `X_1..X_k, Z_1..Z_k`; each monomial is a pair of
/// `k`-bit masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anf2kPolynomial {
    k: u32,
    monomials: BTreeSet<(u32, u32)>,
}

impl Anf2kPolynomial {
    pub fn new(k: u32, monomials: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if k > 30 {
            return Err(Error::PolyShape(format!("k = {k} too large")));
        }
        let set: BTreeSet<(u32, u32)> = monomials.into_iter().collect();
        for &(xm, zm) in &set {
            if k < 32 && (xm >> k != 0 || zm >> k != 0) {
                return Err(Error::PolyShape(format!(
                    "monomial ({xm:#x}, {zm:#x}) exceeds {k} variables per side"
                )));
            }
        }
        Ok(Anf2kPolynomial { k, monomials: set })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Monomials `(xmask, zmask)` in ascending order.
    pub fn monomials(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.monomials.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn toggle(&mut self, m: (u32, u32)) {
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    /// Evaluates at concrete `(x, z)`.
    pub fn eval(&self, x: u32, z: u32) -> u8 {
        let mut acc = 0u8;
        for &(xm, zm) in &self.monomials {
            acc ^= u8::from(xm & x == xm && zm & z == zm);
        }
        acc
    }

    /// Fixes `X = x`, producing a polynomial in the Z variables alone.
    pub fn fix_x(&self, x: u32) -> AnfPolynomial {
        let mut out = AnfPolynomial::zero(self.k);
        for &(xm, zm) in &self.monomials {
            if xm & x == xm {
                out.toggle(zm);
            }
        }
        out
    }

    /// Fixes `Z = z`, producing a polynomial in the X variables alone.
    pub fn fix_z(&self, z: u32) -> AnfPolynomial {
        let mut out = AnfPolynomial::zero(self.k);
        for &(xm, zm) in &self.monomials {
            if zm & z == zm {
                out.toggle(xm);
            }
        }
        out
    }
}

/// Substitutes `u_i := X_i ⊕ Z_i` into `poly`: each monomial over a support
/// set `S` expands to the sum over all ways of drawing every variable from
/// either side, `Σ_{A ⊆ S} X_A · Z_{S∖A}`, with GF(2) cancellation.
/// The evaluation identity `ỹ(x, z) = y(x ⊕ z)` holds for all `x, z`.
pub fn xor_substitute(poly: &AnfPolynomial) -> Anf2kPolynomial {
    let k = poly.k();
    if k <= 13 {
        // Dense parity accumulation: toggles are single bit flips, and the
        // index order (xmask high, zmask low) matches the set order.
        let span = 1usize << (2 * k);
        let mut bits = vec![0u64; span.div_ceil(64)];
        for s in poly.monomials() {
            let mut a = s;
            loop {
                let idx = ((a as usize) << k) | (s ^ a) as usize;
                bits[idx >> 6] ^= 1u64 << (idx & 63);
                if a == 0 {
                    break;
                }
                a = (a - 1) & s;
            }
        }
        let mask = (1u32 << k) - 1;
        let mut sorted = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let idx = (w << 6) | word.trailing_zeros() as usize;
                sorted.push(((idx >> k) as u32, idx as u32 & mask));
                word &= word - 1;
            }
        }
        return Anf2kPolynomial { k, monomials: sorted.into_iter().collect() };
    }
    let mut out = Anf2kPolynomial { k, monomials: BTreeSet::new() };
    for s in poly.monomials() {
        // Enumerate all subsets of s, including the empty one.
        let mut a = s;
        loop {
            out.toggle((a, s ^ a));
            if a == 0 {
                break;
            }
            a = (a - 1) & s;
        }
    }
    out
}

/// Splits by per-side degree: monomials with X-degree `<= f` go into the
/// X-low part (ties included), the rest must have Z-degree `<= f` and go into
/// the Z-low part. Errors when a monomial is big on both sides.
pub fn xz_degree_split(
    poly: &Anf2kPolynomial,
    f: u32,
) -> Result<(Anf2kPolynomial, Anf2kPolynomial)> {
    let mut xlow = Anf2kPolynomial { k: poly.k, monomials: BTreeSet::new() };
    let mut zlow = Anf2kPolynomial { k: poly.k, monomials: BTreeSet::new() };
    for (xm, zm) in poly.monomials() {
        if xm.count_ones() <= f {
            xlow.monomials.insert((xm, zm));
        } else if zm.count_ones() <= f {
            zlow.monomials.insert((xm, zm));
        } else {
            return Err(Error::PolyShape(format!(
                "monomial ({xm:#x}, {zm:#x}) exceeds degree {f} on both sides"
            )));
        }
    }
    Ok((xlow, zlow))
}

/// Embeds an input of the matrix-indexing predicate at size `k` into the
/// xor-indexing predicate at size `2k`: `x' = 0^k·x`, `z' = z·0^k`, and `y'`
/// the `2^(2k)`-bit vector arranged so that `y'(x' ⊕ z') = y(x, z)`, i.e.
/// `y'` at string position `z·x` holds `y` at string position `x·2^k + z`.
///
/// `y` is the `2^(2k)`-bit matrix as a slice of 0/1 values in string order.
pub fn embed_indexing(k: u32, x: u64, y: &[u8], z: u64) -> Result<(u64, Vec<u8>, u64)> {
    if k == 0 || k > 14 {
        return Err(Error::BadFamily(format!("embedding needs 1 <= k <= 14, got {k}")));
    }
    let side = 1u64 << k;
    if x >= side || z >= side {
        return Err(Error::InputWidth { x, y: 0, z, p: k, q: 1 << (2 * k), r: k });
    }
    if y.len() != 1usize << (2 * k) {
        return Err(Error::TableLength { got: y.len(), want: 1usize << (2 * k) });
    }
    if y.iter().any(|&b| b > 1) {
        return Err(Error::PolyShape("matrix entries must be 0 or 1".into()));
    }
    let x_prime = x; // 0^k · x reads as the same integer
    let z_prime = z << k;
    let mut y_prime = vec![0u8; y.len()];
    for w in 0..y.len() as u64 {
        // position w = (z-part, x-part) in string order
        let zw = w >> k;
        let xw = w & (side - 1);
        y_prime[w as usize] = y[((xw << k) | zw) as usize];
    }
    Ok((x_prime, y_prime, z_prime))
}

/// Evaluates the xor-indexing predicate directly from a `2^K`-bit vector:
/// `y(x ⊕ z)` with the crate's string-position convention.
pub fn xor_indexing_eval(big_k: u32, x: u64, y: &[u8], z: u64) -> Result<u8> {
    if y.len() != 1usize << big_k {
        return Err(Error::TableLength { got: y.len(), want: 1usize << big_k });
    }
    let w = x ^ z;
    if w >= y.len() as u64 {
        return Err(Error::InputWidth { x, y: 0, z, p: big_k, q: 0, r: big_k });
    }
    Ok(y[w as usize])
}
