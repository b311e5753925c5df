//! Exact univariate polynomials in `p` with big-integer coefficients.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `count · p^p_exp · (1-p)^q_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BasisTerm {
    pub count: u64,
    pub p_exp: u32,
    pub q_exp: u32,
}

/// Polynomial in `p`, canonical in the monomial basis.
///
/// Equality compares monomial coefficients only; the `(1-p)`-basis terms a
/// polynomial was built from are kept for reporting.
#[derive(Clone, Debug, Default)]
pub struct InfluencePoly {
    coeffs: Vec<BigInt>,
    basis: Vec<BasisTerm>,
}

fn binomial_row(e: u32) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(e as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for t in 0..e {
        c = c * BigInt::from(e - t) / BigInt::from(t + 1);
        row.push(c.clone());
    }
    row
}

impl InfluencePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        InfluencePoly { coeffs, basis: Vec::new() }
    }

    /// `c · p^e`.
    pub fn monomial(c: impl Into<BigInt>, e: u32) -> Self {
        let mut coeffs = vec![BigInt::zero(); e as usize + 1];
        coeffs[e as usize] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// `c · (1-p)^e`.
    pub fn one_minus_p_pow(c: impl Into<BigInt>, e: u32) -> Self {
        let c = c.into();
        let coeffs = binomial_row(e)
            .into_iter()
            .enumerate()
            .map(|(t, b)| if t % 2 == 0 { &c * b } else { -(&c * b) })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Expands `Σ count · p^a (1-p)^b` into monomial form.
    pub fn from_basis(terms: Vec<BasisTerm>) -> Self {
        let degree = terms.iter().map(|t| (t.p_exp + t.q_exp) as usize).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        for term in terms.iter().filter(|t| t.count > 0) {
            let count = BigInt::from(term.count);
            for (t, b) in binomial_row(term.q_exp).into_iter().enumerate() {
                let slot = &mut coeffs[term.p_exp as usize + t];
                if t % 2 == 0 {
                    *slot += &count * b;
                } else {
                    *slot -= &count * b;
                }
            }
        }
        let mut poly = Self::from_coeffs(coeffs);
        poly.basis = terms;
        poly
    }

    /// Monomial coefficients of `p^0, p^1, …` with no trailing zeros.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn basis_form(&self) -> &[BasisTerm] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation at any rational.
    pub fn eval_at(&self, p: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * p + BigRational::from_integer(c.clone()))
    }

    /// Exact evaluation at `p ∈ (0, 1)`.
    pub fn evaluate(&self, p: &BigRational) -> Result<BigRational> {
        check_probability(p)?;
        Ok(self.eval_at(p))
    }

    /// Coefficients as decimal strings.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(BigInt::to_string).collect()
    }
}

pub fn check_probability(p: &BigRational) -> Result<()> {
    if p <= &BigRational::zero() || p >= &BigRational::one() {
        return Err(Error::ProbabilityOutOfRange(p.to_string()));
    }
    Ok(())
}

/// Parses `num/den`, an integer, or a short decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidParameters(format!("cannot parse rational {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    s.parse::<BigRational>().map_err(|_| bad())
}

/// Formats a rational as `num/den` (denominator always present).
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl PartialEq for InfluencePoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for InfluencePoly {}

fn combine(a: &[BigInt], b: &[BigInt], f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Vec<BigInt> {
    let zero = BigInt::zero();
    (0..a.len().max(b.len()))
        .map(|i| f(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect()
}

impl Add for &InfluencePoly {
    type Output = InfluencePoly;
    fn add(self, rhs: &InfluencePoly) -> InfluencePoly {
        InfluencePoly::from_coeffs(combine(&self.coeffs, &rhs.coeffs, |a, b| a + b))
    }
}

impl Add for InfluencePoly {
    type Output = InfluencePoly;
    fn add(self, rhs: InfluencePoly) -> InfluencePoly {
        &self + &rhs
    }
}

impl Sub for &InfluencePoly {
    type Output = InfluencePoly;
    fn sub(self, rhs: &InfluencePoly) -> InfluencePoly {
        InfluencePoly::from_coeffs(combine(&self.coeffs, &rhs.coeffs, |a, b| a - b))
    }
}

impl Mul for &InfluencePoly {
    type Output = InfluencePoly;
    fn mul(self, rhs: &InfluencePoly) -> InfluencePoly {
        if self.is_zero() || rhs.is_zero() {
            return InfluencePoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        InfluencePoly::from_coeffs(out)
    }
}

impl Sum for InfluencePoly {
    fn sum<I: Iterator<Item = InfluencePoly>>(iter: I) -> Self {
        iter.fold(InfluencePoly::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a InfluencePoly> for InfluencePoly {
    fn sum<I: Iterator<Item = &'a InfluencePoly>>(iter: I) -> Self {
        iter.fold(InfluencePoly::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for InfluencePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (d, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}")?,
            }
            match d {
                0 => {}
                1 => f.write_str("p")?,
                _ => write!(f, "p^{d}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
