//! Words over GF(2), the covering order, and dense GF(2) matrix algebra.
//!
//! Coordinates are 0-based. Coordinate `i` of a [`Word`] is bit `i` of its
//! machine representation, and in the textual form it is the `i`-th character
//! from the left. Every other module (including the hypercube tables, where
//! table index `m` encodes the word whose bits are `m`) uses this convention.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of length `n <= 63` over GF(2).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: u64,
    len: u8,
}

impl Word {
    pub const MAX_LEN: usize = 63;

    fn mask(len: usize) -> u64 {
        if len >= 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        }
    }

    fn check_len(len: usize) -> Result<()> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(Error::WordLength(len));
        }
        Ok(())
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::check_len(len)?;
        Ok(Word { bits: 0, len: len as u8 })
    }

    /// Builds a word from raw bits; bits at or above `len` must be clear.
    pub fn from_bits(bits: u64, len: usize) -> Result<Self> {
        Self::check_len(len)?;
        if bits & !Self::mask(len) != 0 {
            return Err(Error::InvalidParameters(format!(
                "bits {bits:#x} extend beyond length {len}"
            )));
        }
        Ok(Word { bits, len: len as u8 })
    }

    /// Standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Result<Self> {
        Self::check_len(len)?;
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, n: len });
        }
        Ok(Word { bits: 1 << i, len: len as u8 })
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::check_len(len)?;
        Ok(Word { bits: Self::mask(len), len: len as u8 })
    }

    /// Indicator word of a set of coordinates.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Result<Self> {
        let mut w = Self::zero(len)?;
        for i in support {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, n: len });
            }
            w.bits |= 1 << i;
        }
        Ok(w)
    }

    /// Parses a string of `0`/`1` characters, leftmost character = coordinate 0.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::check_len(s.chars().count())?;
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                other => return Err(Error::InvalidBitChar(other)),
            }
        }
        Ok(Word { bits, len: s.chars().count() as u8 })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len() && (self.bits >> i) & 1 == 1
    }

    pub fn with_bit(mut self, i: usize, value: bool) -> Self {
        debug_assert!(i < self.len());
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
        self
    }

    pub fn support(&self) -> Vec<usize> {
        crate::bits::iter_ones(self.bits).collect()
    }

    /// True iff `supp(other) ⊆ supp(self)`.
    pub fn covers(&self, other: &Word) -> Result<bool> {
        self.same_len(other)?;
        Ok(self.bits & other.bits == other.bits)
    }

    pub fn dot(&self, other: &Word) -> bool {
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    fn same_len(&self, other: &Word) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

/// Number of nonzero coordinates.
pub fn weight(w: &Word) -> u32 {
    w.weight()
}

/// Covering order: `x` covers `y` iff `supp(y) ⊆ supp(x)`.
pub fn covers(x: &Word, y: &Word) -> Result<bool> {
    x.covers(y)
}

impl BitXor for Word {
    type Output = Word;
    fn bitxor(self, rhs: Word) -> Word {
        debug_assert_eq!(self.len, rhs.len);
        Word { bits: self.bits ^ rhs.bits, len: self.len }
    }
}

impl BitAnd for Word {
    type Output = Word;
    fn bitand(self, rhs: Word) -> Word {
        debug_assert_eq!(self.len, rhs.len);
        Word { bits: self.bits & rhs.bits, len: self.len }
    }
}

impl BitOr for Word {
    type Output = Word;
    fn bitor(self, rhs: Word) -> Word {
        debug_assert_eq!(self.len, rhs.len);
        Word { bits: self.bits | rhs.bits, len: self.len }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Dense matrix over GF(2), stored as rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Word>,
}

/// Reduced row echelon form with pivot bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Gf2Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// A particular solution plus a basis of the homogeneous solution space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Word,
    pub nullspace: Vec<Word>,
}

impl Gf2Matrix {
    pub fn new(cols: usize, rows: Vec<Word>) -> Result<Self> {
        Word::check_len(cols)?;
        for r in &rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, found: r.len() });
            }
        }
        Ok(Gf2Matrix { cols, rows })
    }

    pub fn empty(cols: usize) -> Result<Self> {
        Self::new(cols, Vec::new())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n).map(|i| Word::unit(n, i)).collect::<Result<Vec<_>>>()?;
        Self::new(n, rows)
    }

    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows.iter().map(|r| Word::parse(r.as_ref())).collect::<Result<Vec<_>>>()?;
        let cols = parsed
            .first()
            .map(Word::len)
            .ok_or_else(|| Error::InvalidParameters("matrix needs a column count".into()))?;
        Self::new(cols, parsed)
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// Column `c` as a word of length `row_count` (requires `1 <= row_count <= 63`).
    pub fn column(&self, c: usize) -> Result<Word> {
        let mut bits = 0u64;
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                bits |= 1 << r;
            }
        }
        Word::from_bits(bits, self.rows.len())
    }

    pub fn transpose(&self) -> Result<Gf2Matrix> {
        let rows = (0..self.cols).map(|c| self.column(c)).collect::<Result<Vec<_>>>()?;
        Gf2Matrix::new(self.rows.len(), rows)
    }

    /// Row combination `m·M`: XOR of the rows selected by the bits of `m`.
    pub fn combine(&self, m: u64) -> Word {
        let mut bits = 0u64;
        for (r, row) in self.rows.iter().enumerate() {
            if (m >> r) & 1 == 1 {
                bits ^= row.bits;
            }
        }
        Word { bits, len: self.cols as u8 }
    }

    /// `M·x` as a word of length `row_count`.
    pub fn mul_vec(&self, x: &Word) -> Result<Word> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: x.len() });
        }
        let mut bits = 0u64;
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                bits |= 1 << r;
            }
        }
        Word::from_bits(bits, self.rows.len())
    }

    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(c) {
                    *row = *row ^ pivot;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        Rref {
            matrix: Gf2Matrix { cols: self.cols, rows },
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Solves `A·x = b` where `A` is `self` and `b` has length `row_count`.
    ///
    /// Returns `Ok(None)` when the system is inconsistent.
    pub fn solve(&self, b: &Word) -> Result<Option<Solution>> {
        if b.len() != self.rows.len() {
            return Err(Error::LengthMismatch { expected: self.rows.len(), found: b.len() });
        }
        let mut rows: Vec<(u64, bool)> = self.rows.iter().enumerate().map(|(r, w)| (w.bits, b.get(r))).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| (rows[r].0 >> c) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let (pb, prhs) = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && (row.0 >> c) & 1 == 1 {
                    row.0 ^= pb;
                    row.1 ^= prhs;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        if rows[rank..].iter().any(|&(_, rhs)| rhs) {
            return Ok(None);
        }
        let mut particular = 0u64;
        for (r, &c) in pivots.iter().enumerate() {
            if rows[r].1 {
                particular |= 1 << c;
            }
        }
        let nullspace = (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = 1u64 << f;
                for (r, &c) in pivots.iter().enumerate() {
                    if (rows[r].0 >> f) & 1 == 1 {
                        v |= 1 << c;
                    }
                }
                Word { bits: v, len: self.cols as u8 }
            })
            .collect();
        Ok(Some(Solution {
            particular: Word { bits: particular, len: self.cols as u8 },
            nullspace,
        }))
    }

    /// Kronecker product `self ⊗ other`; column `(r, t)` maps to `r·other.cols + t`.
    pub fn kronecker(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        let n = self.cols * other.cols;
        if n > Word::MAX_LEN {
            return Err(Error::LengthOverCap { n });
        }
        let mut rows = Vec::with_capacity(self.rows.len() * other.rows.len());
        for a in &self.rows {
            for b in &other.rows {
                let mut bits = 0u64;
                for r in crate::bits::iter_ones(a.bits) {
                    bits |= b.bits << (r * other.cols);
                }
                rows.push(Word { bits, len: n as u8 });
            }
        }
        Gf2Matrix::new(n, rows)
    }

    /// Reorders columns: new column `c` is old column `perm[c]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Gf2Matrix> {
        if perm.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: perm.len() });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let bits = perm
                    .iter()
                    .enumerate()
                    .filter(|(_, &old)| row.get(old))
                    .fold(0u64, |acc, (new, _)| acc | 1 << new);
                Word { bits, len: self.cols as u8 }
            })
            .collect();
        Gf2Matrix::new(self.cols, rows)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            n: self.cols,
            rows: self.rows.iter().map(Word::to_string).collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let rows = json.rows.iter().map(|r| Word::parse(r)).collect::<Result<Vec<_>>>()?;
        Self::new(json.n, rows)
    }
}

/// Wire form of a matrix: `{"n": <int>, "rows": ["0101...", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<String>,
}

/// For `G = [I_k | P]` returns `H = [Pᵀ | I_{n-k}]`, so that `G·Hᵀ = 0`.
pub fn parity_check_from_systematic(g: &Gf2Matrix) -> Result<Gf2Matrix> {
    let k = g.row_count();
    let n = g.col_count();
    if k > n {
        return Err(Error::NotSystematic);
    }
    let id_mask = if k == 0 { 0 } else { (1u64 << k) - 1 };
    for (i, row) in g.rows().iter().enumerate() {
        if row.bits() & id_mask != 1 << i {
            return Err(Error::NotSystematic);
        }
    }
    let mut rows = Vec::with_capacity(n - k);
    for t in 0..n - k {
        let mut bits = 1u64 << (k + t);
        for (i, row) in g.rows().iter().enumerate() {
            if row.get(k + t) {
                bits |= 1 << i;
            }
        }
        rows.push(Word::from_bits(bits, n)?);
    }
    Gf2Matrix::new(n, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    pub(crate) fn section3_generator() -> Gf2Matrix {
        Gf2Matrix::from_strings(&["100010101", "010010110", "001001100", "000111111"]).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(w("00000").weight(), 0);
        assert_eq!(w("11100").weight(), 3);
        let word = Word::from_support(28, (0..4).chain(12..28)).unwrap();
        assert_eq!(weight(&word), 20);
    }

    #[test]
    fn covering() {
        assert!(covers(&w("110100011"), &w("110000011")).unwrap());
        assert!(!covers(&w("00000"), &w("10000")).unwrap());
        assert!(covers(&w("10110"), &w("10110")).unwrap());
        assert!(covers(&w("101"), &w("1010")).is_err());
    }

    #[test]
    fn covering_is_a_partial_order() {
        let n = 5;
        let all: Vec<Word> = (0..1u64 << n).map(|b| Word::from_bits(b, n).unwrap()).collect();
        for x in &all {
            assert!(x.covers(x).unwrap());
            for y in &all {
                if x.covers(y).unwrap() && y.covers(x).unwrap() {
                    assert_eq!(x, y);
                }
                for z in &all {
                    if x.covers(y).unwrap() && y.covers(z).unwrap() {
                        assert!(x.covers(z).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let word = w("0110001");
        assert_eq!(word.to_string(), "0110001");
        assert_eq!(word.support(), vec![1, 2, 6]);
        assert!(Word::parse("01x").is_err());
        assert!(Word::parse("").is_err());
        assert!(Word::zero(64).is_err());
    }

    #[test]
    fn rref_examples() {
        let id = Gf2Matrix::identity(4).unwrap();
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1, 2, 3]);
        assert_eq!(r.rank, 4);

        let g = section3_generator();
        let r = g.rref();
        assert_eq!(r.rank, 4);
        assert_eq!(r.pivots, vec![0, 1, 2, 3]);

        let dup = Gf2Matrix::from_strings(&["1100", "0110", "1100"]).unwrap();
        assert!(dup.rank() < dup.row_count());
    }

    #[test]
    fn parity_check_of_section3_code_annihilates_codewords() {
        let g = section3_generator();
        let h = parity_check_from_systematic(&g).unwrap();
        assert_eq!(h.row_count(), 5);
        assert_eq!(h.rank(), 5);
        for m in 0..16u64 {
            let c = g.combine(m);
            assert!(h.mul_vec(&c).unwrap().is_zero(), "H·c != 0 for {c}");
        }
    }

    #[test]
    fn parity_check_edge_cases() {
        let h = parity_check_from_systematic(&Gf2Matrix::identity(5).unwrap()).unwrap();
        assert_eq!(h.row_count(), 0);
        assert_eq!(h.col_count(), 5);

        let h = parity_check_from_systematic(&Gf2Matrix::from_strings(&["11"]).unwrap()).unwrap();
        assert_eq!(h.rows(), &[w("11")]);

        let not_sys = Gf2Matrix::from_strings(&["0110", "1001"]).unwrap();
        assert_eq!(parity_check_from_systematic(&not_sys), Err(Error::NotSystematic));
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let id = Gf2Matrix::identity(6).unwrap();
        let b = w("101101");
        let sol = id.solve(&b).unwrap().unwrap();
        assert_eq!(sol.particular, b);
        assert!(sol.nullspace.is_empty());

        let a = Gf2Matrix::from_strings(&["110", "000"]).unwrap();
        assert_eq!(a.solve(&w("01")).unwrap(), None);
        assert!(a.solve(&w("011")).is_err());
    }

    #[test]
    fn kronecker_layout() {
        let a = Gf2Matrix::from_strings(&["10", "01"]).unwrap();
        let b = Gf2Matrix::from_strings(&["111"]).unwrap();
        let k = a.kronecker(&b).unwrap();
        assert_eq!(k.rows(), &[w("111000"), w("000111")]);
    }

    #[test]
    fn matrix_json_round_trip() {
        let g = section3_generator();
        let json = serde_json::to_string(&g.to_json()).unwrap();
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(Gf2Matrix::from_json(&back).unwrap(), g);
    }
}
