//! Exact coordinate influences of a code,
//!
//! `I_j(p) = Σ_{x ∈ B_j} p^(wt(x)-1) (1-p)^(n-wt(x))`,
//!
//! the closed forms for parity-check and minimum-disjoint-support codes, and
//! the consistency checks that relate them to monotone Boolean functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::codes::BinaryCode;
use crate::error::{Error, Result};
use crate::hypercube::{self, all_b_sets, BruteForceCap, IndicatorMap, WeightProfile};
pub use crate::poly::InfluencePoly;
use crate::structure::MdsStructure;

/// Brute-force influence of one coordinate, with the facts about `B_j`
/// that are cheap to record before the table is dropped.
#[derive(Clone, Debug)]
pub struct CoordinateInfluence {
    pub j: usize,
    pub profile: WeightProfile,
    pub poly: InfluencePoly,
    /// `0 ∉ B_j`.
    pub zero_excluded: bool,
    /// `B_j` is invariant under flipping coordinate `j`.
    pub flip_closed: bool,
}

fn from_b_set(j: usize, b: &IndicatorMap) -> CoordinateInfluence {
    let profile = b.weight_profile();
    let zero_excluded = !b.contains(0);
    // a zero word would need p^-1; it never occurs, but guard the expansion
    let poly = if zero_excluded { profile.to_poly(1) } else { InfluencePoly::zero() };
    CoordinateInfluence {
        j,
        poly,
        zero_excluded,
        flip_closed: b.is_flip_closed(j),
        profile,
    }
}

pub fn influence(code: &BinaryCode, j: usize, cap: BruteForceCap) -> Result<InfluencePoly> {
    let b = hypercube::b_set(code, j, cap)?;
    Ok(from_b_set(j, &b).poly)
}

/// Influences of every coordinate, sharing `Ω` tables between coordinates.
pub fn influences(code: &BinaryCode, cap: BruteForceCap) -> Result<Vec<CoordinateInfluence>> {
    let sets = all_b_sets(code, cap, false)?;
    Ok(sets.b.iter().enumerate().map(|(j, b)| from_b_set(j, b)).collect())
}

pub fn total_influence(code: &BinaryCode, cap: BruteForceCap) -> Result<InfluencePoly> {
    Ok(influences(code, cap)?.into_iter().map(|c| c.poly).sum())
}

/// `(n-1)(1-p)^(n-2)` for the length-`n` even-weight code.
pub fn closed_form_parity_check(n: usize, j: usize) -> Result<InfluencePoly> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("parity-check length {n} < 2")));
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    Ok(InfluencePoly::one_minus_p_pow(n as u64 - 1, n as u32 - 2))
}

/// `n(n-1)(1-p)^(n-2)`.
pub fn closed_form_total_parity_check(n: usize) -> Result<InfluencePoly> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("parity-check length {n} < 2")));
    }
    Ok(InfluencePoly::one_minus_p_pow((n * (n - 1)) as u64, n as u32 - 2))
}

/// `p^(|T|-2)` where `T` is the part containing `j`.
pub fn closed_form_mds(structure: &MdsStructure, j: usize) -> Result<InfluencePoly> {
    if j >= structure.n() {
        return Err(Error::IndexOutOfRange { index: j, n: structure.n() });
    }
    let t = structure.part_size(j);
    if t < 2 {
        return Err(Error::PartTooSmall { j });
    }
    Ok(InfluencePoly::monomial(1, t as u32 - 2))
}

/// `Σ_ℓ |T_ℓ| p^(|T_ℓ|-2)`.
pub fn closed_form_total_mds(structure: &MdsStructure) -> Result<InfluencePoly> {
    structure
        .parts()
        .iter()
        .map(|part| {
            if part.len() < 2 {
                return Err(Error::PartTooSmall { j: part[0] });
            }
            Ok(InfluencePoly::monomial(part.len() as u64, part.len() as u32 - 2))
        })
        .sum()
}

/// Whether `p·I_j(C) = Σ_{i≠j} I_j(χ_{Ω_i})` and the conditions on the
/// boundaries `∂_jΩ_i` under which it is expected.
#[derive(Clone, Debug)]
pub struct SumRelationReport {
    pub j: usize,
    pub boundaries_distinct: bool,
    pub boundaries_disjoint: bool,
    pub identity_holds: bool,
    /// `p·I_j(C)`.
    pub lhs: InfluencePoly,
    /// `Σ_{i≠j} I_j(χ_{Ω_i})`.
    pub rhs: InfluencePoly,
}

pub fn sum_relation_check(code: &BinaryCode, j: usize, cap: BruteForceCap) -> Result<SumRelationReport> {
    cap.check(code.n())?;
    code.check_coordinate(j)?;
    let n = code.n();
    let mut boundaries: Vec<IndicatorMap> = Vec::with_capacity(n - 1);
    let mut rhs = InfluencePoly::zero();
    let mut union = IndicatorMap::empty(n)?;
    for i in (0..n).filter(|&i| i != j) {
        let om = hypercube::omega(code, i, cap)?;
        rhs = &rhs + &hypercube::monotone_influence(&om, j)?;
        let d = om.boundary(j);
        union.union_with(&d)?;
        boundaries.push(d);
    }
    let pairs = || {
        boundaries
            .iter()
            .enumerate()
            .flat_map(|(a, x)| boundaries[a + 1..].iter().map(move |y| (x, y)))
    };
    let boundaries_distinct = pairs().all(|(x, y)| x != y);
    let boundaries_disjoint = pairs().all(|(x, y)| !x.intersects(y));
    let lhs = &InfluencePoly::monomial(1, 1) * &from_b_set(j, &union).poly;
    Ok(SumRelationReport {
        j,
        boundaries_distinct,
        boundaries_disjoint,
        identity_holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Evaluation grid `1/10, 2/10, …, 9/10`.
pub fn grid() -> Vec<BigRational> {
    (1..10).map(|k| BigRational::new(BigInt::from(k), BigInt::from(10))).collect()
}

/// Checks of the containments `S_j ⊔ (S_j+e_j) ⊆ Ω_j ⊔ (Ω_j+e_j) ⊆ B_j`
/// and of the lower bound `I_j ≥ Σ_{x∈S_j} p^(wt-1)(1-p)^(n-wt)` when `S_i = S_j`.
#[derive(Clone, Debug)]
pub struct SiEqualReport {
    pub i: usize,
    pub j: usize,
    pub s_closure_in_omega_closure: bool,
    pub omega_closure_in_b: bool,
    pub lower_bound: InfluencePoly,
    pub influence: InfluencePoly,
    /// `influence - lower_bound >= 0` at every grid point.
    pub bound_holds_on_grid: bool,
}

pub fn si_equal_lower_bound_check(
    code: &BinaryCode,
    i: usize,
    j: usize,
    cap: BruteForceCap,
) -> Result<SiEqualReport> {
    cap.check(code.n())?;
    code.check_coordinate(i)?;
    code.check_coordinate(j)?;
    if i == j || code.column_key(i) != code.column_key(j) {
        return Err(Error::SupportSetsDiffer { i, j });
    }
    let n = code.n();
    let mut s_j = IndicatorMap::empty(n)?;
    for c in code.codewords()?.filter(|c| c.get(j)) {
        s_j.insert(c.bits());
    }
    let mut s_closure = s_j.translate(j);
    s_closure.union_with(&s_j)?;

    let om = hypercube::omega(code, j, cap)?;
    let mut om_closure = om.translate(j);
    om_closure.union_with(&om)?;

    let b = hypercube::b_set(code, j, cap)?;
    let influence = from_b_set(j, &b).poly;
    let lower_bound = s_j.weight_profile().to_poly(1);
    let gap = &influence - &lower_bound;
    let bound_holds_on_grid = grid().iter().all(|p| gap.eval_at(p) >= BigRational::zero());
    Ok(SiEqualReport {
        i,
        j,
        s_closure_in_omega_closure: s_closure.is_subset_of(&om_closure),
        omega_closure_in_b: om_closure.is_subset_of(&b),
        lower_bound,
        influence,
        bound_holds_on_grid,
    })
}

/// `0 <= I(p) <= 1/p` at every grid point.
pub fn within_unit_bounds(poly: &InfluencePoly) -> bool {
    grid().iter().all(|p| {
        let v = poly.eval_at(p);
        v >= BigRational::zero() && v <= p.recip()
    })
}

/// Right-hand side of the EXIT transition-width inequality,
/// `2·μ(1-μ)/I · ln((1-ε)/ε)`. Diagnostic only; the logarithm is `f64`.
pub fn exit_bound(mu: &BigRational, total_influence: &BigRational, eps: &BigRational) -> Result<f64> {
    if total_influence <= &BigRational::zero() {
        return Err(Error::VacuousBound);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if eps <= &BigRational::zero() || eps >= &half {
        return Err(Error::EpsilonOutOfRange(eps.to_string()));
    }
    let factor = BigRational::from_integer(BigInt::from(2)) * mu * (BigRational::one() - mu) / total_influence;
    let ratio = (BigRational::one() - eps) / eps;
    let factor = factor.to_f64().unwrap_or(f64::NAN);
    let log = ratio.to_f64().unwrap_or(f64::NAN).ln();
    Ok(factor * log)
}

pub fn evaluate(poly: &InfluencePoly, p: &BigRational) -> Result<BigRational> {
    poly.evaluate(p)
}
