//! Constructive upper bounds: the `n = p+q+r` split and the `2^r + r`
//! (resp. `2^p + p`) slice constructions.

use crate::certificate::DecompositionCertificate;
use crate::error::{Error, Result};
use crate::function::TernaryFunction;

/// Which side carries the full slice in [`upper_bound_slice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Largest `u + v` for which a table-based `t` is still materialized.
const MAX_T_BITS: u32 = 30;

/// Splits `y` after its first `j` bits: `a = ⟨x, y[..j]⟩`, `b = ⟨y[j..], z⟩`.
/// The certificate always verifies and has size exactly `p + q + r`.
pub fn upper_bound_split(f: &TernaryFunction, j: u32) -> Result<DecompositionCertificate> {
    let (p, q, r) = (f.p(), f.q(), f.r());
    if j > q {
        return Err(Error::CertificateShape(format!("split point {j} > q = {q}")));
    }
    let u = p + j;
    let v = (q - j) + r;
    let low_mask = (1u64 << (q - j)) - 1;
    let a = (0..1u64 << (p + q))
        .map(|i| {
            let x = i >> q;
            let y = i & ((1u64 << q) - 1);
            (x << j) | (y >> (q - j))
        })
        .collect();
    let b = (0..1u64 << (q + r))
        .map(|i| {
            let y = i >> r;
            let z = i & ((1u64 << r) - 1);
            ((y & low_mask) << r) | z
        })
        .collect();
    let t = (0..1u64 << (u + v))
        .map(|i| {
            let alpha = i >> v;
            let beta = i & ((1u64 << v) - 1);
            let x = alpha >> j;
            let y_hi = alpha & ((1u64 << j) - 1);
            let y_lo = beta >> r;
            let z = beta & ((1u64 << r) - 1);
            let y = (y_hi << (q - j)) | y_lo;
            f.eval_unchecked(x, y, z)
        })
        .collect();
    Ok(DecompositionCertificate { u, v, a, b, t })
}

/// Sends one argument verbatim and the whole slice of `T` over the other:
/// for [`Side::Right`], `a(x,y)` encodes `z ↦ T(x,y,z)` in `s·2^r` bits and
/// `b = z`; the size is `s·2^r + r` (degenerating to `2^r + r` for predicates).
pub fn upper_bound_slice(f: &TernaryFunction, side: Side) -> Result<DecompositionCertificate> {
    let (p, q, r, s) = (f.p(), f.q(), f.r(), f.s());
    match side {
        Side::Right => {
            let wide = (s as u64) << r;
            if wide + r as u64 > MAX_T_BITS as u64 {
                let got = (wide + r as u64).min(u32::MAX as u64) as u32;
                return Err(Error::SizeCeiling { got, ceiling: MAX_T_BITS });
            }
            let u = wide as u32;
            let v = r;
            let a = (0..1u64 << (p + q))
                .map(|i| {
                    let x = i >> q;
                    let y = i & ((1u64 << q) - 1);
                    let mut word = 0u64;
                    for z in 0..1u64 << r {
                        word |= f.eval_unchecked(x, y, z) << (s * ((1 << r) - 1 - z as u32));
                    }
                    word
                })
                .collect();
            let b = (0..1u64 << (q + r)).map(|i| i & ((1u64 << r) - 1)).collect();
            let mask = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
            let t = (0..1u64 << (u + v))
                .map(|i| {
                    let alpha = i >> v;
                    let beta = i & ((1u64 << v) - 1);
                    (alpha >> (s * ((1 << r) - 1 - beta as u32))) & mask
                })
                .collect();
            Ok(DecompositionCertificate { u, v, a, b, t })
        }
        Side::Left => {
            let wide = (s as u64) << p;
            if wide + p as u64 > MAX_T_BITS as u64 {
                let got = (wide + p as u64).min(u32::MAX as u64) as u32;
                return Err(Error::SizeCeiling { got, ceiling: MAX_T_BITS });
            }
            let v = wide as u32;
            let u = p;
            let a = (0..1u64 << (p + q)).map(|i| i >> q).collect();
            let b = (0..1u64 << (q + r))
                .map(|i| {
                    let y = i >> r;
                    let z = i & ((1u64 << r) - 1);
                    let mut word = 0u64;
                    for x in 0..1u64 << p {
                        word |= f.eval_unchecked(x, y, z) << (s * ((1 << p) - 1 - x as u32));
                    }
                    word
                })
                .collect();
            let mask = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
            let t = (0..1u64 << (u + v))
                .map(|i| {
                    let alpha = i >> v;
                    let beta = i & ((1u64 << v) - 1);
                    (beta >> (s * ((1 << p) - 1 - alpha as u32))) & mask
                })
                .collect();
            Ok(DecompositionCertificate { u, v, a, b, t })
        }
    }
}
