//! Multilinear polynomials over the two-element field.
//!
//! A monomial over `k` variables is a subset bitmask: bit `i` of the mask
//! means the monomial contains variable `i`, and variable `i` of a point
//! `w` is bit `i` of `w` as an integer. A polynomial is a set of monomials
//! (all coefficients are 1); addition toggles set membership.

mod xor2k;

pub mod protocol;

pub use xor2k::{
    embed_indexing, xor_indexing_eval, xor_substitute, xz_degree_split, Anf2kPolynomial,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Algebraic normal form of a Boolean function of `k` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnfPolynomial {
    k: u32,
    monomials: BTreeSet<u32>,
}

impl AnfPolynomial {
    pub fn new(k: u32, monomials: impl IntoIterator<Item = u32>) -> Result<Self> {
        if k > 30 {
            return Err(Error::PolyShape(format!("k = {k} too large")));
        }
        let set: BTreeSet<u32> = monomials.into_iter().collect();
        if let Some(&m) = set.iter().next_back() {
            if k < 32 && m >> k != 0 {
                return Err(Error::PolyShape(format!("monomial mask {m:#x} exceeds {k} variables")));
            }
        }
        Ok(AnfPolynomial { k, monomials: set })
    }

    pub fn zero(k: u32) -> Self {
        AnfPolynomial { k, monomials: BTreeSet::new() }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Monomial masks in ascending order.
    pub fn monomials(&self) -> impl Iterator<Item = u32> + '_ {
        self.monomials.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.monomials.contains(&mask)
    }

    /// GF(2) addition: toggles membership of `mask`.
    pub fn toggle(&mut self, mask: u32) {
        if !self.monomials.remove(&mask) {
            self.monomials.insert(mask);
        }
    }

    /// Largest monomial degree, or 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    /// Truth table of the polynomial, one bit per point in point order.
    pub fn truth_table(&self) -> Vec<u8> {
        (0..1u32 << self.k).map(|w| eval_anf(self, w)).collect()
    }
}

/// ANF of the function given by `table` (one 0/1 entry per point, point `w`
/// at index `w`), via the in-place GF(2) subset (Möbius) transform. The
/// transform is an involution: applying it to the truth table of an ANF's
/// evaluations returns the same coefficient vector.
pub fn anf_from_tt(table: &[u8]) -> Result<AnfPolynomial> {
    let len = table.len();
    if !len.is_power_of_two() || len == 0 {
        return Err(Error::PolyShape(format!("table length {len} is not a power of two")));
    }
    let k = len.trailing_zeros();
    if table.iter().any(|&b| b > 1) {
        return Err(Error::PolyShape("table entries must be 0 or 1".into()));
    }
    let mut coeffs = table.to_vec();
    for i in 0..k {
        let bit = 1usize << i;
        for mask in 0..len {
            if mask & bit != 0 {
                coeffs[mask] ^= coeffs[mask ^ bit];
            }
        }
    }
    Ok(AnfPolynomial {
        k,
        monomials: coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(m, _)| m as u32)
            .collect(),
    })
}

/// Evaluates the ANF at a point: the GF(2) sum over monomials contained in
/// the point's support.
pub fn eval_anf(poly: &AnfPolynomial, point: u32) -> u8 {
    let mut acc = 0u8;
    for &m in &poly.monomials {
        acc ^= u8::from(m & point == m);
    }
    acc
}

/// Splits at degree `d`: the low part keeps monomials of degree `<= d`, the
/// high part the rest. The parts are disjoint and re-union to the input.
pub fn degree_split(poly: &AnfPolynomial, d: u32) -> (AnfPolynomial, AnfPolynomial) {
    let (low, high) = poly.monomials.iter().partition(|m| m.count_ones() <= d);
    (
        AnfPolynomial { k: poly.k, monomials: low },
        AnfPolynomial { k: poly.k, monomials: high },
    )
}

/// Wire format of an ANF file.
#[derive(Debug, Serialize, Deserialize)]
struct AnfFile {
    k: u32,
    monomials: Vec<u32>,
}

impl AnfPolynomial {
    /// Canonical JSON: monomial masks ascending.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&AnfFile { k: self.k, monomials: self.monomials().collect() })
            .expect("anf file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AnfFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        AnfPolynomial::new(file.k, file.monomials)
    }
}
