//! Erasure recovery: recoverability oracles, an erasure decoder, and a
//! seeded Monte Carlo estimate of the probability that a coordinate is lost.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Word};
use crate::poly::check_probability;

/// A received word over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedWord {
    symbols: Vec<Option<bool>>,
}

impl ReceivedWord {
    pub fn new(symbols: Vec<Option<bool>>) -> Result<Self> {
        if symbols.is_empty() || symbols.len() > Word::MAX_LEN {
            return Err(Error::WordLength(symbols.len()));
        }
        Ok(ReceivedWord { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Option<bool>] {
        &self.symbols
    }

    /// Bit `i` set iff symbol `i` is erased.
    pub fn erasure_pattern(&self) -> Word {
        let bits = self
            .symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        Word::from_bits(bits, self.len()).expect("length checked on construction")
    }

    /// Whether `c` agrees with every non-erased symbol.
    pub fn agrees_with(&self, c: &Word) -> bool {
        c.len() == self.len()
            && self
                .symbols
                .iter()
                .enumerate()
                .all(|(i, s)| s.map_or(true, |b| c.get(i) == b))
    }
}

impl FromStr for ReceivedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(Error::InvalidBitChar(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        ReceivedWord::new(symbols)
    }
}

impl fmt::Display for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                Some(false) => "0",
                Some(true) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecoveryOutcome {
    Decoded(Word),
    /// `consistent` codewords agree with the received word; `witnesses` are two of them.
    Ambiguous { consistent: u128, witnesses: (Word, Word) },
    Inconsistent,
}

impl RecoveryOutcome {
    pub fn to_json(&self) -> Value {
        match self {
            RecoveryOutcome::Decoded(c) => json!({"outcome": "decoded", "codeword": c.to_string()}),
            RecoveryOutcome::Ambiguous { consistent, witnesses: (x, y) } => json!({
                "outcome": "ambiguous",
                "consistent_codewords": consistent.to_string(),
                "witnesses": [x.to_string(), y.to_string()],
                "difference": (*x ^ *y).to_string(),
            }),
            RecoveryOutcome::Inconsistent => json!({"outcome": "inconsistent"}),
        }
    }
}

fn check_len(code: &BinaryCode, e: &Word) -> Result<()> {
    if e.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), found: e.len() });
    }
    Ok(())
}

/// Columns of the reduced basis at the given coordinates, as the rows of a
/// `k`-column system. `None` when the selection is empty.
fn column_system(code: &BinaryCode, coords: impl Iterator<Item = usize>) -> Option<Gf2Matrix> {
    let k = code.k();
    let rows: Vec<Word> = coords
        .map(|t| Word::from_bits(code.column_key(t), k).expect("k <= 63"))
        .collect();
    (!rows.is_empty()).then(|| Gf2Matrix::new(k, rows).expect("rows have length k"))
}

/// True iff `e` covers no nonzero codeword.
pub fn pattern_recoverable(code: &BinaryCode, e: &Word) -> Result<bool> {
    check_len(code, e)?;
    if code.k() == 0 {
        return Ok(true);
    }
    // a nonzero message vanishing off supp(e) exists iff the kept columns lose rank
    let kept = column_system(code, (0..code.n()).filter(|&t| !e.get(t)));
    Ok(kept.map_or(0, |m| m.rank()) == code.k())
}

/// Enumerative form of [`pattern_recoverable`]; needs `k <= 28`.
pub fn pattern_recoverable_enumerative(code: &BinaryCode, e: &Word) -> Result<bool> {
    check_len(code, e)?;
    Ok(!code.codewords()?.any(|c| !c.is_zero() && e.covers(&c).expect("lengths checked")))
}

/// True iff coordinate `i` is recoverable from erasure pattern `e`, i.e. the
/// system `(mG)_t = 0` for `t ∉ supp(e)`, `(mG)_i = 1` has no solution.
pub fn coordinate_recoverable(code: &BinaryCode, e: &Word, i: usize) -> Result<bool> {
    check_len(code, e)?;
    code.check_coordinate(i)?;
    if code.k() == 0 {
        return Ok(true);
    }
    let coords: Vec<usize> = (0..code.n()).filter(|&t| !e.get(t)).chain([i]).collect();
    let rhs_bits = 1u64 << (coords.len() - 1);
    let b = Word::from_bits(rhs_bits, coords.len())?;
    let system = column_system(code, coords.into_iter()).expect("contains row i");
    Ok(system.solve(&b)?.is_none())
}

/// Enumerative form of [`coordinate_recoverable`]: no `c ∈ S_i` is covered by `e`.
pub fn coordinate_recoverable_enumerative(code: &BinaryCode, e: &Word, i: usize) -> Result<bool> {
    check_len(code, e)?;
    code.check_coordinate(i)?;
    Ok(!code
        .codewords()?
        .any(|c| c.get(i) && e.covers(&c).expect("lengths checked")))
}

/// Solves for the codewords consistent with `w` over the message space.
pub fn decode_erasures(code: &BinaryCode, w: &ReceivedWord) -> Result<RecoveryOutcome> {
    if w.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), found: w.len() });
    }
    let n = code.n();
    let k = code.k();
    let zero = Word::zero(n)?;
    if k == 0 {
        return Ok(if w.agrees_with(&zero) { RecoveryOutcome::Decoded(zero) } else { RecoveryOutcome::Inconsistent });
    }
    let kept: Vec<usize> = (0..n).filter(|&t| w.symbols()[t].is_some()).collect();
    let Some(system) = column_system(code, kept.iter().copied()) else {
        return Ok(RecoveryOutcome::Ambiguous {
            consistent: 1u128 << k,
            witnesses: (zero, code.basis()[0]),
        });
    };
    let rhs = kept
        .iter()
        .enumerate()
        .filter(|&(_, &t)| w.symbols()[t] == Some(true))
        .fold(0u64, |acc, (r, _)| acc | 1 << r);
    let Some(sol) = system.solve(&Word::from_bits(rhs, kept.len())?)? else {
        return Ok(RecoveryOutcome::Inconsistent);
    };
    let x = code.encode(sol.particular.bits());
    match sol.nullspace.first() {
        None => Ok(RecoveryOutcome::Decoded(x)),
        Some(v) => Ok(RecoveryOutcome::Ambiguous {
            consistent: 1u128 << sol.nullspace.len(),
            witnesses: (x, code.encode(sol.particular.bits() ^ v.bits())),
        }),
    }
}

pub const MC_ALGORITHM: &str = "chacha8/stream-per-4096-trials/bernoulli-by-integer-range";
const MC_BLOCK: u64 = 4096;

/// Monte Carlo estimate of `μ_p(Ω_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub unrecoverable: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
    pub algorithm: &'static str,
}

// Reduced basis of a set of column vectors, one per leading bit.
struct Span {
    rows: [u64; 64],
}

impl Span {
    fn new() -> Self {
        Span { rows: [0; 64] }
    }

    fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if self.rows[top] == 0 {
                break;
            }
            v ^= self.rows[top];
        }
        v
    }

    fn insert(&mut self, v: u64) {
        let v = self.reduce(v);
        if v != 0 {
            self.rows[63 - v.leading_zeros() as usize] = v;
        }
    }
}

fn bernoulli_parts(p: &BigRational) -> Result<(u64, u64)> {
    check_probability(p)?;
    let num = p.numer().to_u64();
    let den = p.denom().to_u64();
    match (num, den) {
        (Some(num), Some(den)) => Ok((num, den)),
        _ => Err(Error::InvalidParameters(format!("probability {p} needs a 64-bit denominator"))),
    }
}

/// Samples `trials` i.i.d. Bernoulli(`p`) erasure patterns and counts those from
/// which coordinate `i` cannot be recovered. Block `b` of 4096 trials draws
/// from ChaCha8 stream `b` keyed by `seed`, so the result is independent of
/// thread count.
pub fn mc_unrecoverable_prob(
    code: &BinaryCode,
    i: usize,
    p: &BigRational,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    code.check_coordinate(i)?;
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let (num, den) = bernoulli_parts(p)?;
    let n = code.n();
    let cols: Vec<u64> = (0..n).map(|t| code.column_key(t)).collect();
    let target = cols[i];
    let blocks = trials.div_ceil(MC_BLOCK);
    let unrecoverable: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = MC_BLOCK.min(trials - b * MC_BLOCK);
            let mut lost = 0u64;
            for _ in 0..len {
                let mut span = Span::new();
                let mut erased_i = false;
                for (t, &col) in cols.iter().enumerate() {
                    if rng.gen_range(0..den) < num {
                        erased_i |= t == i;
                    } else {
                        span.insert(col);
                    }
                }
                // i is lost iff it is erased and its column leaves the span of the kept ones
                if erased_i && span.reduce(target) != 0 {
                    lost += 1;
                }
            }
            lost
        })
        .sum();
    let estimate = unrecoverable as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McEstimate { trials, unrecoverable, estimate, stderr, seed, algorithm: MC_ALGORITHM })
}

/// `(estimate - exact) / stderr`, or `None` when the standard error is zero.
pub fn z_score(est: &McEstimate, exact: &BigRational) -> Option<f64> {
    let exact = BigRational::to_f64(exact)?;
    if est.stderr == 0.0 {
        return if est.estimate == exact { Some(0.0) } else { None };
    }
    Some((est.estimate - exact) / est.stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{from_matrix, parity_check_code, repetition_code};
    use crate::poly::parse_rational;

    fn section3() -> BinaryCode {
        from_matrix(&Gf2Matrix::from_strings(&["100010101", "010010110", "001001100", "000111111"]).unwrap())
    }

    fn toy() -> BinaryCode {
        from_matrix(&Gf2Matrix::from_strings(&["11100", "00111"]).unwrap())
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn received_word_parsing() {
        let r: ReceivedWord = "**1*001**".parse().unwrap();
        assert_eq!(r.erasure_pattern(), w("110100011"));
        assert_eq!(r.to_string(), "**1*001**");
        assert!("01x".parse::<ReceivedWord>().is_err());
        assert!("".parse::<ReceivedWord>().is_err());
    }

    #[test]
    fn pattern_examples() {
        let c = section3();
        assert!(c.contains(&w("110000011")));
        assert!(!pattern_recoverable(&c, &w("110100011")).unwrap());
        assert!(pattern_recoverable(&c, &w("000000000")).unwrap());
        assert!(!pattern_recoverable(&c, &w("111111111")).unwrap());
        for bits in 0..512u64 {
            let e = Word::from_bits(bits, 9).unwrap();
            assert_eq!(
                pattern_recoverable(&c, &e).unwrap(),
                pattern_recoverable_enumerative(&c, &e).unwrap()
            );
        }
        assert!(pattern_recoverable(&c, &w("11")).is_err());
    }

    #[test]
    fn coordinate_examples() {
        assert!(!coordinate_recoverable(&toy(), &w("11100"), 0).unwrap());
        assert!(coordinate_recoverable(&toy(), &w("00000"), 3).unwrap());
        let pc = parity_check_code(10).unwrap();
        assert!(coordinate_recoverable(&pc, &Word::unit(10, 1).unwrap(), 1).unwrap());
        assert!(!coordinate_recoverable(&pc, &w("1100000000"), 1).unwrap());
    }

    #[test]
    fn pattern_is_conjunction_over_coordinates() {
        let c = section3();
        for bits in 0..512u64 {
            let e = Word::from_bits(bits, 9).unwrap();
            let all = (0..9).all(|i| coordinate_recoverable(&c, &e, i).unwrap());
            assert_eq!(pattern_recoverable(&c, &e).unwrap(), all);
            for i in 0..9 {
                assert_eq!(
                    coordinate_recoverable(&c, &e, i).unwrap(),
                    coordinate_recoverable_enumerative(&c, &e, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn decode_ambiguous_word() {
        let c = section3();
        let r: ReceivedWord = "**1*001**".parse().unwrap();
        let RecoveryOutcome::Ambiguous { consistent, witnesses: (x, y) } = decode_erasures(&c, &r).unwrap() else {
            panic!("expected ambiguity");
        };
        assert!(consistent >= 2);
        assert!(x != y && c.contains(&x) && c.contains(&y));
        assert!(r.agrees_with(&x) && r.agrees_with(&y));
        assert!(r.erasure_pattern().covers(&(x ^ y)).unwrap());
        assert!(c.contains(&w("101100110")) && c.contains(&w("011100101")));
    }

    #[test]
    fn decode_trivial_cases() {
        let c = section3();
        let cw = w("101100110");
        let r: ReceivedWord = cw.to_string().parse().unwrap();
        assert_eq!(decode_erasures(&c, &r).unwrap(), RecoveryOutcome::Decoded(cw));
        let all: ReceivedWord = "*********".parse().unwrap();
        assert!(matches!(
            decode_erasures(&c, &all).unwrap(),
            RecoveryOutcome::Ambiguous { consistent: 16, .. }
        ));
        let bad: ReceivedWord = "100000000".parse().unwrap();
        assert_eq!(decode_erasures(&c, &bad).unwrap(), RecoveryOutcome::Inconsistent);
        let single: ReceivedWord = "*01100110".parse().unwrap();
        assert_eq!(decode_erasures(&c, &single).unwrap(), RecoveryOutcome::Decoded(cw));
    }

    #[test]
    fn monte_carlo_repetition() {
        let rep = repetition_code(3, 5).unwrap();
        let half = parse_rational("1/2").unwrap();
        let est = mc_unrecoverable_prob(&rep, 0, &half, 100_000, 42).unwrap();
        let z = z_score(&est, &parse_rational("1/8").unwrap()).unwrap();
        assert!(z.abs() <= 4.0, "z = {z}");
        assert_eq!(est, mc_unrecoverable_prob(&rep, 0, &half, 100_000, 42).unwrap());
    }

    #[test]
    fn monte_carlo_edges() {
        let rep = repetition_code(3, 2).unwrap();
        let tiny = parse_rational("1/1000000000").unwrap();
        let est = mc_unrecoverable_prob(&rep, 0, &tiny, 5000, 1).unwrap();
        assert_eq!(est.unrecoverable, 0);
        assert_eq!(est.estimate, 0.0);

        let unit = from_matrix(&Gf2Matrix::from_strings(&["0100", "1011"]).unwrap());
        let p = parse_rational("3/10").unwrap();
        let est = mc_unrecoverable_prob(&unit, 1, &p, 50_000, 7).unwrap();
        assert!(z_score(&est, &p).unwrap().abs() <= 4.0);
        assert!(mc_unrecoverable_prob(&unit, 1, &p, 0, 7).is_err());
        assert!(mc_unrecoverable_prob(&unit, 1, &parse_rational("1").unwrap(), 10, 7).is_err());
    }
}
