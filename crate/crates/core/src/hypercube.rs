//! Bit-packed indicator tables over all `2^n` words and the transforms that
//! build the recoverability sets from them.
//!
//! Table position `m` holds membership of the word whose bit `i` is bit `i`
//! of `m` (coordinate `i` ↔ bit `i`). Tables are stored as `u64` words, so
//! a direction `b < 6` acts inside each machine word and a direction
//! `b >= 6` pairs whole words `2^(b-6)` apart.

use std::io::{self, Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bits::{LOW_HALF, WEIGHT_MASK};
use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::poly::{check_probability, BasisTerm, InfluencePoly};

pub const DEFAULT_CAP: usize = 26;
pub const HARD_CAP: usize = 28;

/// Below this many words the kernels stay on the calling thread.
const PAR_THRESHOLD: usize = 1 << 12;

/// Largest length for which exhaustive `2^n` tables are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceCap(usize);

impl BruteForceCap {
    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 || cap > HARD_CAP {
            return Err(Error::InvalidParameters(format!(
                "brute-force cap must be in 1..={HARD_CAP}, got {cap}"
            )));
        }
        Ok(BruteForceCap(cap))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn check(self, n: usize) -> Result<()> {
        if n > self.0 {
            return Err(Error::BruteForceCap { n, cap: self.0 });
        }
        Ok(())
    }

    pub fn allows(self, n: usize) -> bool {
        n <= self.0
    }
}

impl Default for BruteForceCap {
    fn default() -> Self {
        BruteForceCap(DEFAULT_CAP)
    }
}

/// Membership table of a subset of GF(2)^n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndicatorMap {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

#[inline]
fn swap_halves(w: u64, b: usize) -> u64 {
    let s = 1 << b;
    ((w & LOW_HALF[b]) << s) | ((w >> s) & LOW_HALF[b])
}

impl IndicatorMap {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > HARD_CAP {
            return Err(Error::BruteForceCap { n, cap: HARD_CAP });
        }
        Ok(IndicatorMap { n, words: vec![0; word_count(n)] })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut m = Self::empty(n)?;
        let mask = valid_mask(n);
        m.words.iter_mut().for_each(|w| *w = mask);
        Ok(m)
    }

    /// Builds a table from a membership predicate over encodings `0..2^n`.
    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        let mut m = Self::empty(n)?;
        for x in 0..1u64 << n {
            if f(x) {
                m.insert(x);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, m: u64) -> bool {
        (self.words[(m >> 6) as usize] >> (m & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, m: u64) {
        debug_assert!(m < 1u64 << self.n);
        self.words[(m >> 6) as usize] |= 1 << (m & 63);
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member encodings in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(q, &w)| crate::bits::iter_ones(w).map(move |b| ((q as u64) << 6) | b as u64))
    }

    fn same_shape(&self, other: &IndicatorMap) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn union_with(&mut self, other: &IndicatorMap) -> Result<()> {
        self.same_shape(other)?;
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
        Ok(())
    }

    pub fn intersects(&self, other: &IndicatorMap) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &IndicatorMap) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Upward closure in the covering order: after the pass over direction
    /// `b`, every member `x` with `x_b = 0` has forced `x + e_b` in as well.
    /// Total cost `n·2^n` bit operations.
    pub fn upward_close(&mut self) {
        for b in 0..self.n {
            if b < 6 {
                let s = 1 << b;
                let lo = LOW_HALF[b];
                self.for_each_word(move |w| *w |= (*w & lo) << s);
            } else {
                self.for_each_pair(b, |lo, hi| *hi |= *lo);
            }
        }
    }

    pub fn is_upward_closed(&self) -> bool {
        (0..self.n).all(|b| {
            if b < 6 {
                let s = 1 << b;
                self.words.iter().all(|&w| ((w & LOW_HALF[b]) << s) & !w == 0)
            } else {
                let s = 1 << (b - 6);
                self.words
                    .chunks_exact(2 * s)
                    .all(|ch| ch[..s].iter().zip(&ch[s..]).all(|(lo, hi)| lo & !hi == 0))
            }
        })
    }

    /// `{x : member(x) != member(x + e_j)}`.
    pub fn boundary(&self, j: usize) -> IndicatorMap {
        let mut acc = IndicatorMap { n: self.n, words: vec![0; self.words.len()] };
        self.or_boundary_into(j, &mut acc);
        acc
    }

    /// ORs `boundary(j)` into `acc` without materialising it.
    pub fn or_boundary_into(&self, j: usize, acc: &mut IndicatorMap) {
        assert!(j < self.n, "direction {j} out of range for n = {}", self.n);
        assert_eq!(self.n, acc.n);
        let par = self.words.len() >= PAR_THRESHOLD;
        if j < 6 {
            let op = |(a, &w): (&mut u64, &u64)| *a |= w ^ swap_halves(w, j);
            if par {
                acc.words.par_iter_mut().zip(self.words.par_iter()).for_each(op);
            } else {
                acc.words.iter_mut().zip(self.words.iter()).for_each(op);
            }
        } else {
            let s = 1 << (j - 6);
            let op = |(a, t): (&mut [u64], &[u64])| {
                let (alo, ahi) = a.split_at_mut(s);
                for q in 0..s {
                    let d = t[q] ^ t[q + s];
                    alo[q] |= d;
                    ahi[q] |= d;
                }
            };
            if par {
                acc.words.par_chunks_mut(2 * s).zip(self.words.par_chunks(2 * s)).for_each(op);
            } else {
                acc.words.chunks_mut(2 * s).zip(self.words.chunks(2 * s)).for_each(op);
            }
        }
    }

    /// The translate `{x + e_j : x member}`.
    pub fn translate(&self, j: usize) -> IndicatorMap {
        assert!(j < self.n);
        let mut out = self.clone();
        if j < 6 {
            out.for_each_word(move |w| *w = swap_halves(*w, j));
        } else {
            out.for_each_pair(j, |lo, hi| std::mem::swap(lo, hi));
        }
        out
    }

    /// True iff membership is invariant under flipping coordinate `j`.
    pub fn is_flip_closed(&self, j: usize) -> bool {
        self.translate(j) == *self
    }

    pub fn weight_profile(&self) -> WeightProfile {
        let n = self.n;
        let low_bits = n.min(6);
        let tally = |q: usize, w: u64, counts: &mut [u64]| {
            let high = (q as u64).count_ones() as usize;
            for (lw, mask) in WEIGHT_MASK.iter().enumerate().take(low_bits + 1) {
                counts[high + lw] += (w & mask).count_ones() as u64;
            }
        };
        let counts = if self.words.len() >= PAR_THRESHOLD {
            self.words
                .par_iter()
                .enumerate()
                .fold(
                    || vec![0u64; n + 1],
                    |mut c, (q, &w)| {
                        tally(q, w, &mut c);
                        c
                    },
                )
                .reduce(
                    || vec![0u64; n + 1],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        } else {
            let mut c = vec![0u64; n + 1];
            for (q, &w) in self.words.iter().enumerate() {
                tally(q, w, &mut c);
            }
            c
        };
        WeightProfile { n, counts }
    }

    /// Writes the table as an 8-byte little-endian `n` followed by the raw
    /// little-endian bit blob (`max(1, 2^n / 8)` bytes).
    pub fn write_blob<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(&(self.n as u64).to_le_bytes())?;
        let bytes = ((1usize << self.n) / 8).max(1);
        let mut written = 0;
        for w in &self.words {
            let chunk = w.to_le_bytes();
            let take = (bytes - written).min(8);
            out.write_all(&chunk[..take])?;
            written += take;
        }
        Ok(())
    }

    pub fn read_blob<R: Read>(mut input: R) -> Result<IndicatorMap> {
        let mut header = [0u8; 8];
        input
            .read_exact(&mut header)
            .map_err(|e| Error::MalformedBlob(e.to_string()))?;
        let n = u64::from_le_bytes(header) as usize;
        let mut map = IndicatorMap::empty(n)?;
        let bytes = ((1usize << n) / 8).max(1);
        let mut buf = vec![0u8; bytes];
        input
            .read_exact(&mut buf)
            .map_err(|e| Error::MalformedBlob(e.to_string()))?;
        for (q, chunk) in buf.chunks(8).enumerate() {
            let mut le = [0u8; 8];
            le[..chunk.len()].copy_from_slice(chunk);
            map.words[q] = u64::from_le_bytes(le);
        }
        if map.words[0] & !valid_mask(n) != 0 {
            return Err(Error::MalformedBlob("bits set beyond 2^n".into()));
        }
        Ok(map)
    }

    fn for_each_word(&mut self, f: impl Fn(&mut u64) + Sync + Send) {
        if self.words.len() >= PAR_THRESHOLD {
            self.words.par_iter_mut().for_each(f);
        } else {
            self.words.iter_mut().for_each(f);
        }
    }

    fn for_each_pair(&mut self, b: usize, f: impl Fn(&mut u64, &mut u64) + Sync + Send) {
        let s = 1 << (b - 6);
        let op = |ch: &mut [u64]| {
            let (lo, hi) = ch.split_at_mut(s);
            lo.iter_mut().zip(hi.iter_mut()).for_each(|(l, h)| f(l, h));
        };
        if self.words.len() >= PAR_THRESHOLD {
            self.words.par_chunks_mut(2 * s).for_each(op);
        } else {
            self.words.chunks_mut(2 * s).for_each(op);
        }
    }
}

/// Member counts by Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    n: usize,
    counts: Vec<u64>,
}

impl WeightProfile {
    pub fn new(n: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n + 1 {
            return Err(Error::LengthMismatch { expected: n + 1, found: counts.len() });
        }
        Ok(WeightProfile { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N_0, …, N_n`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_w N_w p^(w - shift) (1-p)^(n-w)`; weights below `shift` must be empty.
    pub fn to_poly(&self, shift: u32) -> InfluencePoly {
        let terms = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &count)| {
                let w = w as u32;
                assert!(w >= shift, "weight {w} below shift {shift}");
                BasisTerm { count, p_exp: w - shift, q_exp: self.n as u32 - w }
            })
            .collect();
        InfluencePoly::from_basis(terms)
    }
}

pub fn weight_profile(map: &IndicatorMap) -> WeightProfile {
    map.weight_profile()
}

/// `Ω_i`: every word covering some codeword with coordinate `i` in its
/// support. Seeds the table with `S_i`, then takes the upward closure.
pub fn omega(code: &BinaryCode, i: usize, cap: BruteForceCap) -> Result<IndicatorMap> {
    cap.check(code.n())?;
    code.check_coordinate(i)?;
    let mut map = IndicatorMap::empty(code.n())?;
    for c in code.codewords()?.filter(|c| c.get(i)) {
        map.insert(c.bits());
    }
    map.upward_close();
    Ok(map)
}

/// Limits for [`naive_omega`].
pub const NAIVE_MAX_N: usize = 16;
pub const NAIVE_MAX_ROWS: usize = 12;

/// `Ω_i` straight from the definition: enumerate messages against the raw
/// generator rows, then scan every word for a covered member of `S_i`.
pub fn naive_omega(code: &BinaryCode, i: usize) -> Result<IndicatorMap> {
    let n = code.n();
    let rows = code.generator().rows();
    if n > NAIVE_MAX_N {
        return Err(Error::BruteForceCap { n, cap: NAIVE_MAX_N });
    }
    if rows.len() > NAIVE_MAX_ROWS {
        return Err(Error::DimensionOverCap { k: rows.len(), limit: NAIVE_MAX_ROWS });
    }
    code.check_coordinate(i)?;
    let mut s_i: Vec<u64> = Vec::new();
    for m in 0..1u64 << rows.len() {
        let mut c = 0u64;
        for (r, row) in rows.iter().enumerate() {
            if (m >> r) & 1 == 1 {
                c ^= row.bits();
            }
        }
        if (c >> i) & 1 == 1 && !s_i.contains(&c) {
            s_i.push(c);
        }
    }
    IndicatorMap::from_fn(n, |x| s_i.iter().any(|&c| x & c == c))
}

pub fn boundary(map: &IndicatorMap, j: usize) -> Result<IndicatorMap> {
    if j >= map.n() {
        return Err(Error::IndexOutOfRange { index: j, n: map.n() });
    }
    Ok(map.boundary(j))
}

/// `B_j`: union over `i != j` of the `j`-boundaries of `Ω_i`.
pub fn b_set(code: &BinaryCode, j: usize, cap: BruteForceCap) -> Result<IndicatorMap> {
    cap.check(code.n())?;
    code.check_coordinate(j)?;
    let mut acc = IndicatorMap::empty(code.n())?;
    for class in code.column_classes() {
        if class.iter().any(|&i| i != j) {
            omega(code, class[0], cap)?.or_boundary_into(j, &mut acc);
        }
    }
    Ok(acc)
}

/// Every `B_j` of a code, plus optionally the distinct `Ω` tables.
#[derive(Clone, Debug)]
pub struct BoundarySets {
    pub b: Vec<IndicatorMap>,
    /// `(coordinates sharing this Ω, Ω)` per column class, when retained.
    pub omegas: Option<Vec<(Vec<usize>, IndicatorMap)>>,
}

/// Computes all `B_j` at once. Coordinates with identical generator columns
/// share `S_i` and hence `Ω_i`, so each distinct `Ω` is built once and
/// folded into every `B_j` it contributes to, then dropped unless
/// `retain_omegas` is set. Peak memory is `n + 1` tables.
pub fn all_b_sets(code: &BinaryCode, cap: BruteForceCap, retain_omegas: bool) -> Result<BoundarySets> {
    let n = code.n();
    cap.check(n)?;
    let mut b = (0..n).map(|_| IndicatorMap::empty(n)).collect::<Result<Vec<_>>>()?;
    let mut kept = retain_omegas.then(Vec::new);
    for class in code.column_classes() {
        if code.column_key(class[0]) == 0 {
            // dead coordinates have empty Ω
            if let Some(k) = kept.as_mut() {
                k.push((class, IndicatorMap::empty(n)?));
            }
            continue;
        }
        let om = omega(code, class[0], cap)?;
        b.par_iter_mut().enumerate().for_each(|(j, acc)| {
            if class.iter().any(|&i| i != j) {
                om.or_boundary_into(j, acc);
            }
        });
        if let Some(k) = kept.as_mut() {
            k.push((class, om));
        }
    }
    Ok(BoundarySets { b, omegas: kept })
}

/// Bernoulli-`p` product measure `Σ_w N_w p^w (1-p)^(n-w)`, exact.
pub fn mu_p(map: &IndicatorMap, p: &BigRational) -> Result<BigRational> {
    check_probability(p)?;
    let q = BigRational::one() - p;
    let n = map.n();
    let total = map
        .weight_profile()
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .fold(BigRational::zero(), |acc, (w, &c)| {
            acc + BigRational::from_integer(BigInt::from(c))
                * num_traits::pow(p.clone(), w)
                * num_traits::pow(q.clone(), n - w)
        });
    Ok(total)
}

/// Influence of coordinate `j` on a monotone Boolean function given by its
/// upward-closed indicator: `Σ_{f(x) != f(x+e_j)} p^wt(x) (1-p)^(n-wt(x))`.
pub fn monotone_influence(f: &IndicatorMap, j: usize) -> Result<InfluencePoly> {
    if j >= f.n() {
        return Err(Error::IndexOutOfRange { index: j, n: f.n() });
    }
    if !f.is_upward_closed() {
        return Err(Error::NotMonotone);
    }
    Ok(f.boundary(j).weight_profile().to_poly(0))
}
