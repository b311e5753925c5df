//! The full analysis pipeline and its canonical JSON form.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::codes::{min_distance, BinaryCode, Family};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::hypercube::{BruteForceCap, WeightProfile};
use crate::influence::{
    closed_form_mds, closed_form_parity_check, influences, within_unit_bounds, CoordinateInfluence,
};
use crate::poly::{rational_string, BasisTerm, InfluencePoly};
use crate::structure::{detect_mds, MdsFailure, MdsStructure};

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    pub cap: BruteForceCap,
    pub eval: Vec<BigRational>,
}

/// Which closed form, if any, applies to the whole code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedFormKind {
    ParityCheck,
    Mds,
    None,
}

#[derive(Clone, Debug)]
pub struct CoordinateRecord {
    pub j: usize,
    pub brute: Option<CoordinateInfluence>,
    pub closed_form: Option<InfluencePoly>,
}

impl CoordinateRecord {
    pub fn matches(&self) -> Option<bool> {
        match (&self.brute, &self.closed_form) {
            (Some(b), Some(c)) => Some(&b.poly == c),
            _ => None,
        }
    }

    /// Brute-force polynomial when available, otherwise the closed form.
    pub fn best(&self) -> Option<&InfluencePoly> {
        self.brute.as_ref().map(|b| &b.poly).or(self.closed_form.as_ref())
    }
}

#[derive(Clone, Debug)]
pub enum MdsOutcome {
    Mds(MdsStructure),
    NotMds(MdsFailure),
    Undetermined(String),
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub n: usize,
    pub k: usize,
    pub d: Option<u32>,
    pub family: Family,
    pub mds: MdsOutcome,
    pub closed_form_kind: ClosedFormKind,
    pub records: Vec<CoordinateRecord>,
    pub total: Option<InfluencePoly>,
    pub closed_total: Option<InfluencePoly>,
    pub brute_force_skipped: Option<String>,
    pub notes: Vec<String>,
    pub eval: Vec<BigRational>,
}

/// Whether the code is the full even-weight code of its length.
pub fn is_even_weight_code(code: &BinaryCode) -> bool {
    code.n() >= 2 && code.k() == code.n() - 1 && code.basis().iter().all(|r| r.weight() % 2 == 0)
}

fn toy_code() -> BinaryCode {
    crate::codes::from_matrix(&Gf2Matrix::from_strings(&["11100", "00111"]).expect("valid rows"))
}

fn same_code(a: &BinaryCode, b: &BinaryCode) -> bool {
    a.n() == b.n() && a.basis() == b.basis()
}

/// The `[5,2,3]` total quoted as `6p(1-p)^3 + 22p^2(1-p)^2 + 20p^3(1-p)`.
pub fn toy_quoted_total() -> InfluencePoly {
    InfluencePoly::from_basis(vec![
        BasisTerm { count: 6, p_exp: 1, q_exp: 3 },
        BasisTerm { count: 22, p_exp: 2, q_exp: 2 },
        BasisTerm { count: 20, p_exp: 3, q_exp: 1 },
    ])
}

pub fn analyze(code: &BinaryCode, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let n = code.n();
    let mut notes = Vec::new();
    let d = if code.k() == 0 {
        None
    } else {
        min_distance(code).ok()
    };
    let mds = match detect_mds(code) {
        Ok(Ok(s)) => MdsOutcome::Mds(s),
        Ok(Err(f)) => MdsOutcome::NotMds(f),
        Err(e @ Error::DimensionOverCap { .. }) => MdsOutcome::Undetermined(e.to_string()),
        Err(e) => return Err(e),
    };

    let closed_form_kind = if is_even_weight_code(code) {
        ClosedFormKind::ParityCheck
    } else if matches!(mds, MdsOutcome::Mds(_)) {
        ClosedFormKind::Mds
    } else {
        ClosedFormKind::None
    };
    let closed: Vec<Option<InfluencePoly>> = (0..n)
        .map(|j| match (&closed_form_kind, &mds) {
            (ClosedFormKind::ParityCheck, _) => closed_form_parity_check(n, j).ok(),
            (ClosedFormKind::Mds, MdsOutcome::Mds(s)) => closed_form_mds(s, j).ok(),
            _ => None,
        })
        .collect();
    if let MdsOutcome::Mds(s) = &mds {
        let singletons: Vec<usize> = (0..n).filter(|&j| s.part_size(j) == 1).collect();
        if !singletons.is_empty() {
            notes.push(format!(
                "coordinates {singletons:?} lie in parts of size 1; no closed form applies there"
            ));
        }
    }

    let (brute, brute_force_skipped) = if opts.cap.allows(n) {
        (Some(influences(code, opts.cap)?), None)
    } else {
        let reason = format!("brute force skipped: length {n} exceeds cap {}", opts.cap.get());
        notes.push(reason.clone());
        (None, Some(reason))
    };

    let mut brute_iter = brute.map(Vec::into_iter);
    let records: Vec<CoordinateRecord> = closed
        .into_iter()
        .enumerate()
        .map(|(j, closed_form)| CoordinateRecord {
            j,
            brute: brute_iter.as_mut().and_then(Iterator::next),
            closed_form,
        })
        .collect();

    let total = brute_force_skipped
        .is_none()
        .then(|| records.iter().filter_map(|r| r.brute.as_ref()).map(|b| &b.poly).sum());
    let closed_total = records
        .iter()
        .map(|r| r.closed_form.as_ref())
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().sum());

    if let Some(t) = &total {
        if same_code(code, &toy_code()) {
            let diff = t - &toy_quoted_total();
            notes.push(format!(
                "quoted total 6p(1-p)^3 + 22p^2(1-p)^2 + 20p^3(1-p) differs from the sum of the \
                 per-coordinate influences by {diff}; the sum is reported"
            ));
        }
    }

    Ok(AnalysisReport {
        n,
        k: code.k(),
        d,
        family: code.family().clone(),
        mds,
        closed_form_kind,
        records,
        total,
        closed_total,
        brute_force_skipped,
        notes,
        eval: opts.eval.clone(),
    })
}

fn poly_json(poly: &InfluencePoly) -> Value {
    json!({
        "monomial_coeffs": poly.coeff_strings(),
        "polynomial": poly.to_string(),
    })
}

fn basis_json(terms: &[BasisTerm]) -> Value {
    terms
        .iter()
        .filter(|t| t.count > 0)
        .map(|t| json!([t.count, t.p_exp, t.q_exp]))
        .collect()
}

fn profile_json(profile: &WeightProfile) -> Value {
    json!(profile.counts())
}

fn evaluations_json(poly: Option<&InfluencePoly>, eval: &[BigRational]) -> Value {
    let mut map = Map::new();
    if let Some(poly) = poly {
        for p in eval {
            map.insert(rational_string(p), Value::String(rational_string(&poly.eval_at(p))));
        }
    }
    Value::Object(map)
}

impl AnalysisReport {
    /// True iff some brute-force polynomial disagrees with its closed form.
    pub fn has_mismatch(&self) -> bool {
        self.records.iter().any(|r| r.matches() == Some(false)) || self.total_matches() == Some(false)
    }

    pub fn total_matches(&self) -> Option<bool> {
        match (&self.total, &self.closed_total) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        }
    }

    /// Per-coordinate influences and total, evaluated at each grid point.
    pub fn evaluation_table(&self, grid: &[BigRational]) -> Vec<(BigRational, Vec<Option<BigRational>>, Option<BigRational>)> {
        let total = self.total.as_ref().or(self.closed_total.as_ref());
        grid.iter()
            .map(|p| {
                let per = self.records.iter().map(|r| r.best().map(|q| q.eval_at(p))).collect();
                (p.clone(), per, total.map(|t| t.eval_at(p)))
            })
            .collect()
    }

    pub fn coordinate_json(&self, r: &CoordinateRecord) -> Value {
        let (profile, basis, coeffs, poly_str, invariants) = match &r.brute {
            Some(b) => (
                profile_json(&b.profile),
                basis_json(b.poly.basis_form()),
                json!(b.poly.coeff_strings()),
                json!(b.poly.to_string()),
                json!({
                    "zero_excluded": b.zero_excluded,
                    "flip_closed": b.flip_closed,
                    "within_unit_bounds": within_unit_bounds(&b.poly),
                }),
            ),
            None => (Value::Null, Value::Null, Value::Null, Value::Null, Value::Null),
        };
        json!({
            "j": r.j,
            "weight_profile": profile,
            "basis_form": basis,
            "monomial_coeffs": coeffs,
            "polynomial": poly_str,
            "closed_form": r.closed_form.as_ref().map(InfluencePoly::to_string),
            "closed_form_coeffs": r.closed_form.as_ref().map(InfluencePoly::coeff_strings),
            "matches_closed_form": r.matches(),
            "invariants": invariants,
            "evaluations": evaluations_json(r.best(), &self.eval),
        })
    }

    pub fn to_json(&self) -> Value {
        let mds = match &self.mds {
            MdsOutcome::Mds(s) => json!({
                "is_mds": true,
                "reason": Value::Null,
                "parts": s.parts(),
                "u": s.u().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            }),
            MdsOutcome::NotMds(f) => json!({"is_mds": false, "reason": f.to_string(), "parts": [], "u": []}),
            MdsOutcome::Undetermined(why) => json!({"is_mds": Value::Null, "reason": why, "parts": [], "u": []}),
        };
        let closed_form = match self.closed_form_kind {
            ClosedFormKind::ParityCheck => json!("parity_check"),
            ClosedFormKind::Mds => json!("minimum_disjoint_support"),
            ClosedFormKind::None => Value::Null,
        };
        let total_best = self.total.as_ref().or(self.closed_total.as_ref());
        json!({
            "code": {
                "n": self.n,
                "k": self.k,
                "d": self.d,
                "family": serde_json::to_value(&self.family).expect("family serializes"),
            },
            "mds": mds,
            "closed_form_kind": closed_form,
            "brute_force": {
                "computed": self.brute_force_skipped.is_none(),
                "skipped_reason": self.brute_force_skipped,
            },
            "coordinates": self.records.iter().map(|r| self.coordinate_json(r)).collect::<Vec<_>>(),
            "total": {
                "brute_force": self.total.as_ref().map(poly_json),
                "closed_form": self.closed_total.as_ref().map(poly_json),
                "matches_closed_form": self.total_matches(),
                "evaluations": evaluations_json(total_best, &self.eval),
            },
            "notes": self.notes,
        })
    }
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn canonical_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{distinct_weight_code, from_matrix, parity_check_code, repetition_code};
    use crate::poly::parse_rational;

    #[test]
    fn repetition_report() {
        let rpt = analyze(&repetition_code(3, 5).unwrap(), &AnalyzeOptions::default()).unwrap();
        assert_eq!(rpt.closed_form_kind, ClosedFormKind::Mds);
        assert!(!rpt.has_mismatch());
        assert_eq!(rpt.total, Some(InfluencePoly::monomial(15, 1)));
        let v = rpt.to_json();
        assert_eq!(v["mds"]["is_mds"], true);
        assert_eq!(v["coordinates"][7]["polynomial"], "p");
        assert_eq!(v["total"]["matches_closed_form"], true);
        assert_eq!(v["code"]["d"], 3);
    }

    #[test]
    fn toy_report_flags_quoted_total() {
        let code = from_matrix(&Gf2Matrix::from_strings(&["11100", "00111"]).unwrap());
        let rpt = analyze(&code, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rpt.closed_form_kind, ClosedFormKind::None);
        assert!(rpt.notes.iter().any(|n| n.contains("4p^4")));
        let v = rpt.to_json();
        assert_eq!(v["mds"]["reason"], "no minimum at coordinate 0");
        assert_eq!(v["coordinates"][2]["weight_profile"], json!([0, 0, 2, 6, 4, 0]));
        assert_eq!(v["coordinates"][0]["basis_form"], json!([[1, 1, 3], [4, 2, 2], [4, 3, 1], [1, 4, 0]]));
        assert_eq!(v["coordinates"][0]["matches_closed_form"], Value::Null);
    }

    #[test]
    fn generic_even_weight_code_uses_parity_form() {
        let code = from_matrix(&Gf2Matrix::from_strings(&["1100", "0110", "0011"]).unwrap());
        let rpt = analyze(&code, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rpt.closed_form_kind, ClosedFormKind::ParityCheck);
        assert!(!rpt.has_mismatch());
        assert!(is_even_weight_code(&parity_check_code(9).unwrap()));
    }

    #[test]
    fn skipped_brute_force_keeps_closed_form() {
        let opts = AnalyzeOptions {
            cap: BruteForceCap::new(20).unwrap(),
            eval: vec![parse_rational("1/2").unwrap()],
        };
        let rpt = analyze(&distinct_weight_code(2, 3).unwrap(), &opts).unwrap();
        assert!(rpt.brute_force_skipped.is_some());
        assert_eq!(
            rpt.closed_total,
            Some(InfluencePoly::monomial(4, 2) + InfluencePoly::monomial(8, 6) + InfluencePoly::monomial(16, 14))
        );
        let v = rpt.to_json();
        assert_eq!(v["brute_force"]["computed"], false);
        assert_eq!(v["coordinates"][0]["evaluations"]["1/2"], "1/4");
        assert!(!rpt.has_mismatch());
    }

    #[test]
    fn canonical_round_trip() {
        let opts = AnalyzeOptions { eval: vec![parse_rational("1/3").unwrap()], ..Default::default() };
        let rpt = analyze(&parity_check_code(6).unwrap(), &opts).unwrap();
        let text = canonical_json(&rpt.to_json());
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical_json(&back), text);
    }
}
