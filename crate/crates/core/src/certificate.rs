//! Decomposition certificates `(u, v, a, b, t)` and their verification.
//!
//! A certificate witnesses `T(x,y,z) = t(a(x,y), b(y,z))`. Index conventions:
//! `a[x·2^q + y]`, `b[y·2^r + z]`, `t[α·2^v + β]`.

use crate::error::{Error, Result};
use crate::function::{InputTriple, TernaryFunction};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub u: u32,
    pub v: u32,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub t: Vec<u64>,
}

impl DecompositionCertificate {
    /// Total message size `u + v`.
    pub fn size(&self) -> u32 {
        self.u + self.v
    }

    /// Checks array lengths and entry ranges against a function's shape.
    pub fn check_shape(&self, f: &TernaryFunction) -> Result<()> {
        if self.u + self.v > 40 {
            return Err(Error::CertificateShape(format!(
                "u + v = {} too large for a table-based t",
                self.u + self.v
            )));
        }
        let want_a = 1usize << (f.p() + f.q());
        let want_b = 1usize << (f.q() + f.r());
        let want_t = 1usize << (self.u + self.v);
        if self.a.len() != want_a {
            return Err(Error::CertificateShape(format!(
                "a has {} entries, want {want_a}",
                self.a.len()
            )));
        }
        if self.b.len() != want_b {
            return Err(Error::CertificateShape(format!(
                "b has {} entries, want {want_b}",
                self.b.len()
            )));
        }
        if self.t.len() != want_t {
            return Err(Error::CertificateShape(format!(
                "t has {} entries, want {want_t}",
                self.t.len()
            )));
        }
        let check_range = |name: &str, arr: &[u64], bits: u32| -> Result<()> {
            if bits >= 64 {
                return Ok(());
            }
            for (i, &e) in arr.iter().enumerate() {
                if e >> bits != 0 {
                    return Err(Error::CertificateShape(format!(
                        "{name}[{i}] = {e} does not fit in {bits} bits"
                    )));
                }
            }
            Ok(())
        };
        check_range("a", &self.a, self.u)?;
        check_range("b", &self.b, self.v)?;
        check_range("t", &self.t, f.s())?;
        Ok(())
    }

    /// Output of the decomposition at one triple. Shape must be valid.
    #[inline]
    pub fn eval_unchecked(&self, f: &TernaryFunction, x: u64, y: u64, z: u64) -> u64 {
        let alpha = self.a[((x << f.q()) | y) as usize];
        let beta = self.b[((y << f.r()) | z) as usize];
        self.t[((alpha << self.v) | beta) as usize]
    }

    /// Canonical JSON encoding of the certificate file.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Returns the first input triple (in index order) where the certificate
/// disagrees with `T`, or `None` if it reproduces `T` everywhere.
pub fn first_counterexample(
    f: &TernaryFunction,
    cert: &DecompositionCertificate,
) -> Result<Option<InputTriple>> {
    cert.check_shape(f)?;
    for (i, &want) in f.table().iter().enumerate() {
        let t = f.triple_of(i);
        if cert.eval_unchecked(f, t.x, t.y, t.z) != want {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// True iff `t(a(x,y), b(y,z)) = T(x,y,z)` for every input triple.
pub fn verify_certificate(f: &TernaryFunction, cert: &DecompositionCertificate) -> Result<bool> {
    Ok(first_counterexample(f, cert)?.is_none())
}

/// Exact fraction of input triples on which the certificate reproduces the
/// predicate `T` (requires `s = 1`).
pub fn agreement(
    f: &TernaryFunction,
    cert: &DecompositionCertificate,
) -> Result<Ratio<u64>> {
    if f.s() != 1 {
        return Err(Error::NotPredicate(f.s()));
    }
    cert.check_shape(f)?;
    let mut matches = 0u64;
    for (i, &want) in f.table().iter().enumerate() {
        let t = f.triple_of(i);
        if cert.eval_unchecked(f, t.x, t.y, t.z) == want {
            matches += 1;
        }
    }
    Ok(Ratio::new(matches, f.table().len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{make_family, FamilySpec};
    use crate::solver::upper_bound_split;

    /// Hand-built parity certificate for the xor family at (1,1,1):
    /// a(x,y) = x ⊕ y, b(y,z) = z, t(α,β) = α ⊕ β.
    pub(crate) fn xor_parity_certificate() -> DecompositionCertificate {
        DecompositionCertificate {
            u: 1,
            v: 1,
            a: vec![0, 1, 1, 0],
            b: vec![0, 1, 0, 1],
            t: vec![0, 1, 1, 0],
        }
    }

    #[test]
    fn trivial_certificate_verifies() {
        let f = make_family(&FamilySpec::Random { p: 1, q: 2, r: 1, seed: 42 }).unwrap();
        let cert = upper_bound_split(&f, f.q()).unwrap();
        assert!(verify_certificate(&f, &cert).unwrap());
    }

    #[test]
    fn xor_parity_certificate_verifies() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        assert!(verify_certificate(&f, &xor_parity_certificate()).unwrap());
    }

    #[test]
    fn constant_messages_cannot_express_xor() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        for tv in 0..2u64 {
            let cert = DecompositionCertificate {
                u: 0,
                v: 0,
                a: vec![0; 4],
                b: vec![0; 4],
                t: vec![tv],
            };
            assert!(!verify_certificate(&f, &cert).unwrap());
        }
    }

    #[test]
    fn counterexample_is_first_in_index_order() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        let mut cert = xor_parity_certificate();
        cert.t[0] ^= 1; // breaks (0,0,0) first
        let ce = first_counterexample(&f, &cert).unwrap();
        assert_eq!(ce, Some(InputTriple::new(0, 0, 0)));
    }

    #[test]
    fn agreement_of_exact_certificate_is_one() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        let a = agreement(&f, &xor_parity_certificate()).unwrap();
        assert_eq!(a, Ratio::new(1, 1));
    }

    #[test]
    fn agreement_of_constant_zero_with_xor_is_half() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        let cert = DecompositionCertificate {
            u: 0,
            v: 0,
            a: vec![0; 4],
            b: vec![0; 4],
            t: vec![0],
        };
        assert_eq!(agreement(&f, &cert).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn agreement_of_constant_zero_with_equality_is_half() {
        // p = r = 1, q = 0: exactly 2 of the 4 pairs have x = z.
        let f = make_family(&FamilySpec::Equality { p: 1, q: 0 }).unwrap();
        let cert = DecompositionCertificate {
            u: 0,
            v: 0,
            a: vec![0; 2],
            b: vec![0; 2],
            t: vec![0],
        };
        assert_eq!(agreement(&f, &cert).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let f = make_family(&FamilySpec::Xor { p: 1, q: 1, r: 1 }).unwrap();
        let cert = DecompositionCertificate {
            u: 1,
            v: 1,
            a: vec![0, 1],
            b: vec![0, 1],
            t: vec![0, 1, 1, 0],
        };
        assert!(verify_certificate(&f, &cert).is_err());
    }

    #[test]
    fn agreement_equals_one_iff_verify_at_111() {
        // Exhaustive at (1,1,1) for a spread of certificates.
        let f = make_family(&FamilySpec::Random { p: 1, q: 1, r: 1, seed: 5 }).unwrap();
        for a0 in 0..2u64 {
            for b0 in 0..2u64 {
                for tmask in 0..16u64 {
                    let cert = DecompositionCertificate {
                        u: 1,
                        v: 1,
                        a: vec![a0, 1, 0, 1],
                        b: vec![b0, 0, 1, 1],
                        t: (0..4).map(|i| (tmask >> i) & 1).collect(),
                    };
                    let ok = verify_certificate(&f, &cert).unwrap();
                    let agr = agreement(&f, &cert).unwrap();
                    assert_eq!(ok, agr == Ratio::new(1, 1));
                }
            }
        }
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = xor_parity_certificate();
        let text = cert.to_json();
        assert_eq!(DecompositionCertificate::from_json(&text).unwrap(), cert);
    }
}
