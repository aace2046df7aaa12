//! Truth-table representation of ternary functions and the built-in families.
//!
//! Bit conventions, fixed once for the whole crate:
//!
//! * A `k`-bit string `s_0 … s_{k-1}` is identified with the integer
//!   `Σ s_i · 2^(k-1-i)`: the leftmost bit is the most significant.
//! * "Bit at position `w`" of a `q`-bit string `y` therefore means
//!   `(y >> (q-1-w)) & 1`.
//! * The table index of an input triple `(x, y, z)` is `((x·2^q + y)·2^r + z)`.

use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Hard ceiling on `p + q + r`: tables take `2^(p+q+r)` entries, so anything
/// past this is rejected up front instead of exhausting memory.
pub const MAX_INPUT_BITS: u32 = 30;

/// Maximum output width in bits.
pub const MAX_OUTPUT_BITS: u32 = 32;

/// Returns the bit of the `k`-bit string `value` at string position `pos`
/// (leftmost position is 0 and most significant).
#[inline]
pub fn bit_at(value: u64, k: u32, pos: u32) -> u64 {
    debug_assert!(pos < k);
    (value >> (k - 1 - pos)) & 1
}

/// One input triple `(x, y, z)`, each component a bit string read as an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputTriple {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl InputTriple {
    pub fn new(x: u64, y: u64, z: u64) -> Self {
        InputTriple { x, y, z }
    }
}

/// A function `T : B^p × B^q × B^r → B^s` stored as a full table of
/// `2^(p+q+r)` output values, each an `s`-bit integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryFunction {
    p: u32,
    q: u32,
    r: u32,
    s: u32,
    table: Vec<u64>,
}

impl TernaryFunction {
    /// Builds a function from its table. The table holds one `s`-bit value per
    /// input index, in index order.
    pub fn new(p: u32, q: u32, r: u32, s: u32, table: Vec<u64>) -> Result<Self> {
        TernaryFunction::with_ceiling(p, q, r, s, table, MAX_INPUT_BITS)
    }

    /// Like [`TernaryFunction::new`] with a custom width ceiling (still
    /// capped by [`MAX_INPUT_BITS`]).
    pub fn with_ceiling(
        p: u32,
        q: u32,
        r: u32,
        s: u32,
        table: Vec<u64>,
        ceiling: u32,
    ) -> Result<Self> {
        let n = p + q + r;
        let ceiling = ceiling.min(MAX_INPUT_BITS);
        if n > ceiling {
            return Err(Error::SizeCeiling { got: n, ceiling });
        }
        if s == 0 || s > MAX_OUTPUT_BITS {
            return Err(Error::BadOutputWidth(s));
        }
        let want = 1usize << n;
        if table.len() != want {
            return Err(Error::TableLength { got: table.len(), want });
        }
        if s < 64 {
            for (i, &v) in table.iter().enumerate() {
                if v >> s != 0 {
                    return Err(Error::TableEntryRange { index: i, value: v, bits: s });
                }
            }
        }
        Ok(TernaryFunction { p, q, r, s, table })
    }

    /// Builds a predicate (`s = 1`) by evaluating `f` on every triple.
    pub fn from_fn(p: u32, q: u32, r: u32, f: impl Fn(u64, u64, u64) -> u64) -> Result<Self> {
        let n = p + q + r;
        if n > MAX_INPUT_BITS {
            return Err(Error::SizeCeiling { got: n, ceiling: MAX_INPUT_BITS });
        }
        let mut table = Vec::with_capacity(1usize << n);
        for x in 0..1u64 << p {
            for y in 0..1u64 << q {
                for z in 0..1u64 << r {
                    table.push(f(x, y, z) & 1);
                }
            }
        }
        TernaryFunction::new(p, q, r, 1, table)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Total input width `n = p + q + r`.
    pub fn input_bits(&self) -> u32 {
        self.p + self.q + self.r
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Table index of a triple: `((x·2^q + y)·2^r + z)`.
    #[inline]
    pub fn index_of(&self, t: InputTriple) -> usize {
        (((t.x << self.q) | t.y) as usize) << self.r | t.z as usize
    }

    /// Inverse of [`TernaryFunction::index_of`]: recovers the triple from a table index.
    #[inline]
    pub fn triple_of(&self, index: usize) -> InputTriple {
        let z = (index as u64) & ((1u64 << self.r) - 1);
        let y = (index as u64 >> self.r) & ((1u64 << self.q) - 1);
        let x = index as u64 >> (self.r + self.q);
        InputTriple { x, y, z }
    }

    fn check_widths(&self, t: InputTriple) -> Result<()> {
        if t.x >> self.p != 0 || t.y >> self.q != 0 || t.z >> self.r != 0 {
            return Err(Error::InputWidth {
                x: t.x,
                y: t.y,
                z: t.z,
                p: self.p,
                q: self.q,
                r: self.r,
            });
        }
        Ok(())
    }

    /// Evaluates the function at one triple.
    pub fn eval(&self, t: InputTriple) -> Result<u64> {
        self.check_widths(t)?;
        Ok(self.table[self.index_of(t)])
    }

    /// Unchecked lookup for hot loops; widths must be valid.
    #[inline]
    pub fn eval_unchecked(&self, x: u64, y: u64, z: u64) -> u64 {
        self.table[((((x << self.q) | y) << self.r) | z) as usize]
    }

    /// Iterates over all input triples in table-index order.
    pub fn triples(&self) -> impl Iterator<Item = InputTriple> + '_ {
        (0..self.table.len()).map(|i| self.triple_of(i))
    }

    /// Mirror image: swaps the roles of `x` and `z` (and of `p` and `r`).
    pub fn mirror(&self) -> TernaryFunction {
        let (p, q, r) = (self.r, self.q, self.p);
        let mut table = vec![0u64; self.table.len()];
        for (i, v) in table.iter_mut().enumerate() {
            let z = (i as u64) & ((1u64 << r) - 1);
            let y = (i as u64 >> r) & ((1u64 << q) - 1);
            let x = i as u64 >> (r + q);
            *v = self.eval_unchecked(z, y, x);
        }
        TernaryFunction { p, q, r, s: self.s, table }
    }
}

/// Built-in function families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// Parity of all `p + q + r` input bits.
    Xor { p: u32, q: u32, r: u32 },
    /// The predicate `x = z` (requires equal side widths; `q` middle bits are ignored).
    Equality { p: u32, q: u32 },
    /// `T(x, y, z) = y(x, z)` with `y` read as a `2^k × 2^k` Boolean matrix;
    /// shape `(k, 2^(2k), k)`.
    Indexing { k: u32 },
    /// `T(x, y, z) = y(x ⊕ z)` with `y` read as a `2^k`-bit vector; shape `(k, 2^k, k)`.
    XorIndexing { k: u32 },
    /// `T(x, y, z) = y(x + z mod 2^k)`; same shape as xor-indexing.
    AddIndexing { k: u32 },
    /// Constant function with the given `s`-bit value.
    Constant { p: u32, q: u32, r: u32, s: u32, value: u64 },
    /// Seeded random predicate; see [`random_predicate`] for the generator.
    Random { p: u32, q: u32, r: u32, seed: u64 },
}

/// Builds the truth table of a built-in family.
pub fn make_family(spec: &FamilySpec) -> Result<TernaryFunction> {
    match *spec {
        FamilySpec::Xor { p, q, r } => TernaryFunction::from_fn(p, q, r, |x, y, z| {
            (x.count_ones() + y.count_ones() + z.count_ones()) as u64 & 1
        }),
        FamilySpec::Equality { p, q } => {
            TernaryFunction::from_fn(p, q, p, |x, _, z| (x == z) as u64)
        }
        FamilySpec::Indexing { k } => {
            if k == 0 {
                return Err(Error::BadFamily("indexing requires k >= 1".into()));
            }
            let q = 1u32
                .checked_shl(2 * k)
                .filter(|&q| k + q + k <= MAX_INPUT_BITS)
                .ok_or(Error::SizeCeiling { got: u32::MAX, ceiling: MAX_INPUT_BITS })?;
            TernaryFunction::from_fn(k, q, k, move |x, y, z| {
                bit_at(y, q, (x << k | z) as u32)
            })
        }
        FamilySpec::XorIndexing { k } => {
            if k == 0 {
                return Err(Error::BadFamily("xor-indexing requires k >= 1".into()));
            }
            let q = 1u32 << k;
            TernaryFunction::from_fn(k, q, k, move |x, y, z| bit_at(y, q, (x ^ z) as u32))
        }
        FamilySpec::AddIndexing { k } => {
            if k == 0 {
                return Err(Error::BadFamily("add-indexing requires k >= 1".into()));
            }
            let q = 1u32 << k;
            let mask = (1u64 << k) - 1;
            TernaryFunction::from_fn(k, q, k, move |x, y, z| {
                bit_at(y, q, ((x + z) & mask) as u32)
            })
        }
        FamilySpec::Constant { p, q, r, s, value } => {
            if s == 0 || s > MAX_OUTPUT_BITS {
                return Err(Error::BadOutputWidth(s));
            }
            if s < 64 && value >> s != 0 {
                return Err(Error::TableEntryRange { index: 0, value, bits: s });
            }
            let n = p + q + r;
            if n > MAX_INPUT_BITS {
                return Err(Error::SizeCeiling { got: n, ceiling: MAX_INPUT_BITS });
            }
            TernaryFunction::new(p, q, r, s, vec![value; 1usize << n])
        }
        FamilySpec::Random { p, q, r, seed } => random_predicate(p, q, r, seed),
    }
}

/// Deterministic random predicate: entry `i` of the table is the low bit of
/// the `i`-th `next_u64` output of `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_predicate(p: u32, q: u32, r: u32, seed: u64) -> Result<TernaryFunction> {
    let n = p + q + r;
    if n > MAX_INPUT_BITS {
        return Err(Error::SizeCeiling { got: n, ceiling: MAX_INPUT_BITS });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = (0..1usize << n).map(|_| rng.next_u64() & 1).collect();
    TernaryFunction::new(p, q, r, 1, table)
}

/// Wire format of a function file; `table` is an ASCII '0'/'1' string of
/// length `2^(p+q+r)·s`, index order, the `s` bits of each entry big-endian.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FunctionFile {
    p: u32,
    q: u32,
    r: u32,
    s: u32,
    table: String,
}

impl TernaryFunction {
    /// Canonical JSON encoding of the function.
    pub fn to_json(&self) -> String {
        let mut bits = String::with_capacity(self.table.len() * self.s as usize);
        for &v in &self.table {
            for j in (0..self.s).rev() {
                bits.push(if (v >> j) & 1 == 1 { '1' } else { '0' });
            }
        }
        serde_json::to_string(&FunctionFile {
            p: self.p,
            q: self.q,
            r: self.r,
            s: self.s,
            table: bits,
        })
        .expect("function file serializes")
    }

    /// Parses the canonical JSON encoding.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FunctionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = file.p + file.q + file.r;
        if n > MAX_INPUT_BITS {
            return Err(Error::SizeCeiling { got: n, ceiling: MAX_INPUT_BITS });
        }
        if file.s == 0 || file.s > MAX_OUTPUT_BITS {
            return Err(Error::BadOutputWidth(file.s));
        }
        let want = (1usize << n) * file.s as usize;
        if file.table.len() != want {
            return Err(Error::TableLength { got: file.table.len(), want: 1usize << n });
        }
        let chars: Vec<char> = file.table.chars().collect();
        let mut table = Vec::with_capacity(1usize << n);
        for i in 0..1usize << n {
            let mut v = 0u64;
            for j in 0..file.s as usize {
                v <<= 1;
                match chars[i * file.s as usize + j] {
                    '0' => {}
                    '1' => v |= 1,
                    c => return Err(Error::Parse(format!("invalid table character {c:?}"))),
                }
            }
            table.push(v);
        }
        TernaryFunction::new(file.p, file.q, file.r, file.s, table)
    }
}
