//! Closed-form versus brute-force sweeps over each code family.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::{
    distinct_weight_code, from_matrix, hybrid_code, parity_check_code, product, repetition_code, BinaryCode,
    Partition,
};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Word};
use crate::hypercube::BruteForceCap;
use crate::influence::{
    closed_form_mds, closed_form_total_mds, closed_form_total_parity_check, influences, within_unit_bounds,
    CoordinateInfluence,
};
use crate::poly::{BasisTerm, InfluencePoly};
use crate::report::toy_quoted_total;
use crate::structure::{detect_mds, verify_disjointness, MdsStructure};

pub const SUITES: [&str; 6] = ["parity_check", "repetition", "distinct_weight", "hybrid", "product", "toy"];

pub const HYBRID_SEED: u64 = 0x5eed_0001;
pub const PRODUCT_SEED: u64 = 0x5eed_0002;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub instance: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.instance)?;
        if !self.failures.is_empty() {
            write!(f, ": {}", self.failures.join("; "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Collects failed checks for one instance.
struct Check {
    instance: String,
    failures: Vec<String>,
}

impl Check {
    fn new(instance: impl Into<String>) -> Self {
        Check { instance: instance.into(), failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn verdict(self) -> Verdict {
        Verdict { passed: self.failures.is_empty(), instance: self.instance, failures: self.failures }
    }
}

/// `0 ∉ B_j`, `B_j` flip-closed in `j`, and `0 <= I_j <= 1/p` on the grid.
fn check_bounds(check: &mut Check, infl: &[CoordinateInfluence]) {
    for c in infl {
        check.expect(c.zero_excluded, || format!("0 in B_{}", c.j));
        check.expect(c.flip_closed, || format!("B_{} not closed under flipping bit {}", c.j, c.j));
        check.expect(within_unit_bounds(&c.poly), || format!("I_{} outside [0, 1/p]", c.j));
    }
}

/// Brute force against `p^(|T|-2)` per coordinate (zero for singleton parts).
fn check_mds_influences(check: &mut Check, s: &MdsStructure, infl: &[CoordinateInfluence]) {
    for c in infl {
        let expected = match closed_form_mds(s, c.j) {
            Ok(cf) => cf,
            Err(Error::PartTooSmall { .. }) => InfluencePoly::zero(),
            Err(e) => {
                check.expect(false, || e.to_string());
                continue;
            }
        };
        check.expect(c.poly == expected, || format!("I_{} = {} but expected {expected}", c.j, c.poly));
    }
    if s.parts().iter().all(|p| p.len() >= 2) {
        let total: InfluencePoly = infl.iter().map(|c| &c.poly).sum();
        match closed_form_total_mds(s) {
            Ok(cf) => check.expect(total == cf, || format!("total {total} but expected {cf}")),
            Err(e) => check.expect(false, || e.to_string()),
        }
    }
}

fn check_mds_code(check: &mut Check, code: &BinaryCode, expected_parts: &[Vec<usize>], cap: BruteForceCap) -> Result<()> {
    let s = match detect_mds(code)? {
        Ok(s) => s,
        Err(f) => {
            check.expect(false, || format!("not detected as MDS: {f}"));
            return Ok(());
        }
    };
    check.expect(verify_disjointness(&s), || "supports not disjoint".into());
    let mut got = s.parts().to_vec();
    let mut want = expected_parts.to_vec();
    for p in got.iter_mut().chain(want.iter_mut()) {
        p.sort_unstable();
    }
    got.sort();
    want.sort();
    check.expect(got == want, || format!("parts {got:?}, expected {want:?}"));
    let infl = influences(code, cap)?;
    check_mds_influences(check, &s, &infl);
    check_bounds(check, &infl);
    Ok(())
}

fn parity_check_suite(cap: BruteForceCap) -> Result<Vec<Verdict>> {
    (2..=14)
        .map(|n| {
            let mut check = Check::new(format!("parity_check n={n}"));
            let code = parity_check_code(n)?;
            let infl = influences(&code, cap)?;
            let expected = InfluencePoly::one_minus_p_pow(n as u64 - 1, n as u32 - 2);
            for c in &infl {
                check.expect(c.poly == expected, || format!("I_{} = {}", c.j, c.poly));
            }
            let total: InfluencePoly = infl.iter().map(|c| &c.poly).sum();
            check.expect(total == closed_form_total_parity_check(n)?, || format!("total {total}"));
            check_bounds(&mut check, &infl);
            Ok(check.verdict())
        })
        .collect()
}

fn repetition_suite(cap: BruteForceCap) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for r in 2..=5usize {
        for k in (1..=5usize).filter(|k| r * k <= 20) {
            let mut check = Check::new(format!("repetition r={r} k={k}"));
            let code = repetition_code(r, k)?;
            let parts: Vec<Vec<usize>> = (0..k).map(|b| (b * r..(b + 1) * r).collect()).collect();
            check_mds_code(&mut check, &code, &parts, cap)?;
            let total: InfluencePoly = influences(&code, cap)?.into_iter().map(|c| c.poly).sum();
            let expected = InfluencePoly::monomial((r * k) as u64, r as u32 - 2);
            check.expect(total == expected, || format!("total {total}, expected {expected}"));
            out.push(check.verdict());
        }
    }
    Ok(out)
}

fn consecutive_parts(sizes: &[usize]) -> Vec<Vec<usize>> {
    Partition::consecutive(sizes).expect("sizes are positive").parts().to_vec()
}

fn distinct_weight_suite(cap: BruteForceCap) -> Result<(Vec<Verdict>, Vec<String>)> {
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for (r, k) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 2)] {
        let mut check = Check::new(format!("distinct_weight r={r} k={k}"));
        let code = distinct_weight_code(r, k)?;
        let sizes: Vec<usize> = (0..k).map(|i| 1 << (r + i)).collect();
        check_mds_code(&mut check, &code, &consecutive_parts(&sizes), cap)?;
        out.push(check.verdict());
    }

    let code = distinct_weight_code(2, 3)?;
    let mut check = Check::new("distinct_weight r=2 k=3 closed form");
    match detect_mds(&code)? {
        Ok(s) => {
            let total = closed_form_total_mds(&s)?;
            let expected = InfluencePoly::monomial(4, 2) + InfluencePoly::monomial(8, 6) + InfluencePoly::monomial(16, 14);
            check.expect(total == expected, || format!("total {total}"));
            check.expect(verify_disjointness(&s), || "supports not disjoint".into());
        }
        Err(f) => check.expect(false, || format!("not detected as MDS: {f}")),
    }
    out.push(check.verdict());
    if cap.allows(code.n()) {
        let mut check = Check::new("distinct_weight r=2 k=3 brute force");
        check_mds_code(&mut check, &code, &consecutive_parts(&[4, 8, 16]), cap)?;
        out.push(check.verdict());
    } else {
        notes.push(format!("distinct_weight r=2 k=3 brute force skipped: n=28 exceeds cap {}", cap.get()));
    }
    Ok((out, notes))
}

/// Random partition of `0..n` into parts of size at least `min_part`.
pub fn random_partition(rng: &mut impl Rng, n: usize, min_part: usize) -> Vec<Vec<usize>> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = if left < 2 * min_part { left } else { rng.gen_range(min_part..=left - min_part) };
        // occasionally take everything that remains
        let s = if rng.gen_bool(0.2) { left } else { s };
        sizes.push(s);
        left -= s;
    }
    let mut coords: Vec<usize> = (0..n).collect();
    coords.shuffle(rng);
    let mut start = 0;
    sizes
        .into_iter()
        .map(|s| {
            let mut part = coords[start..start + s].to_vec();
            part.sort_unstable();
            start += s;
            part
        })
        .collect()
}

/// A hybrid code presented through a randomly mixed (still full-rank) generator.
pub fn random_mds_code(rng: &mut impl Rng, parts: &[Vec<usize>]) -> Result<BinaryCode> {
    let base = hybrid_code(&Partition::new(parts.to_vec())?)?;
    let mut rows: Vec<Word> = base.generator().rows().to_vec();
    let k = rows.len();
    if k >= 2 {
        for _ in 0..3 * k {
            let a = rng.gen_range(0..k);
            let b = rng.gen_range(0..k);
            if a != b {
                rows[a] = rows[a] ^ rows[b];
            }
        }
    }
    Ok(from_matrix(&Gf2Matrix::new(base.n(), rows)?))
}

fn hybrid_suite(cap: BruteForceCap) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(HYBRID_SEED);
    (0..50)
        .map(|t| {
            let n = rng.gen_range(4..=18);
            let parts = random_partition(&mut rng, n, 2);
            let code = random_mds_code(&mut rng, &parts)?;
            let mut check = Check::new(format!("hybrid #{t} n={n} parts={parts:?}"));
            check_mds_code(&mut check, &code, &parts, cap)?;
            Ok(check.verdict())
        })
        .collect()
}

fn product_suite(cap: BruteForceCap) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(PRODUCT_SEED);
    (0..30)
        .map(|t| {
            let n1 = rng.gen_range(2..=10);
            let n2 = rng.gen_range(2..=20 / n1);
            let p1 = random_partition(&mut rng, n1, 1);
            let p2 = random_partition(&mut rng, n2, 1);
            let c1 = random_mds_code(&mut rng, &p1)?;
            let c2 = random_mds_code(&mut rng, &p2)?;
            let code = product(&c1, &c2)?;
            let expected: Vec<Vec<usize>> = p1
                .iter()
                .flat_map(|a| p2.iter().map(move |b| a.iter().flat_map(|&r| b.iter().map(move |&s| r * n2 + s)).collect()))
                .collect();
            let mut check = Check::new(format!("product #{t} {p1:?} x {p2:?}"));
            check_mds_code(&mut check, &code, &expected, cap)?;
            Ok(check.verdict())
        })
        .collect()
}

/// Frozen per-coordinate influences of the `[5,2,3]` code spanned by 11100, 00111.
pub fn toy_expected(j: usize) -> InfluencePoly {
    let t = |count, p_exp, q_exp| BasisTerm { count, p_exp, q_exp };
    if j == 2 {
        InfluencePoly::from_basis(vec![t(2, 1, 3), t(6, 2, 2), t(4, 3, 1)])
    } else {
        InfluencePoly::from_basis(vec![t(1, 1, 3), t(4, 2, 2), t(4, 3, 1), t(1, 4, 0)])
    }
}

fn toy_suite(cap: BruteForceCap) -> Result<(Vec<Verdict>, Vec<String>)> {
    let code = from_matrix(&Gf2Matrix::from_strings(&["11100", "00111"])?);
    let mut check = Check::new("toy [5,2,3]");
    let infl = influences(&code, cap)?;
    for c in &infl {
        let expected = toy_expected(c.j);
        check.expect(c.poly == expected, || format!("I_{} = {}, expected {expected}", c.j, c.poly));
    }
    check_bounds(&mut check, &infl);
    let total: InfluencePoly = infl.iter().map(|c| &c.poly).sum();
    let expected_total: InfluencePoly = (0..5).map(toy_expected).sum();
    check.expect(total == expected_total, || format!("total {total}"));
    let diff = &total - &toy_quoted_total();
    check.expect(diff == InfluencePoly::monomial(4, 4), || format!("quoted total differs by {diff}"));
    match detect_mds(&code)? {
        Err(f) => check.expect(f.to_string() == "no minimum at coordinate 0", || format!("rejected with {f}")),
        Ok(_) => check.expect(false, || "accepted as MDS".into()),
    }
    let notes = vec![format!(
        "quoted total 6p(1-p)^3 + 22p^2(1-p)^2 + 20p^3(1-p) is short of the computed total {total} by {diff}"
    )];
    Ok((vec![check.verdict()], notes))
}

pub fn run_suite(name: &str, cap: BruteForceCap) -> Result<SuiteReport> {
    let (verdicts, notes) = match name {
        "parity_check" => (parity_check_suite(cap)?, Vec::new()),
        "repetition" => (repetition_suite(cap)?, Vec::new()),
        "distinct_weight" => distinct_weight_suite(cap)?,
        "hybrid" => (hybrid_suite(cap)?, Vec::new()),
        "product" => (product_suite(cap)?, Vec::new()),
        "toy" => toy_suite(cap)?,
        other => {
            return Err(Error::InvalidParameters(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport { suite: name.to_string(), verdicts, notes })
}
