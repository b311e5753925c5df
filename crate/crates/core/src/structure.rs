//! Per-coordinate codeword sets `S_i`, minimum support codewords, and
//! detection of the minimum-disjoint-support (MDS) property.
//!
//! "MDS" here always means *minimum disjoint support*: every `S_i` has a
//! covering-order minimum `u_i`, and the distinct supports of the `u_i`
//! partition the coordinates.

use std::fmt;

use serde_json::{json, Value};

use crate::codes::BinaryCode;
use crate::error::Result;
use crate::gf2::Word;

/// Codewords with coordinate `i` in their support.
pub fn support_codewords(code: &BinaryCode, i: usize) -> Result<Vec<Word>> {
    code.check_coordinate(i)?;
    Ok(code.codewords()?.filter(|c| c.get(i)).collect())
}

/// Why a coordinate has no minimum support codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinimumAbsence {
    /// `S_i` is empty.
    DeadCoordinate,
    /// `S_i` has no covering-order minimum.
    NoMinimum,
}

/// The covering-order minimum of `S_i`, if one exists.
pub fn minimum_support_codeword(
    code: &BinaryCode,
    i: usize,
) -> Result<std::result::Result<Word, MinimumAbsence>> {
    code.check_coordinate(i)?;
    minimum_of(code, i)
}

// Two streaming passes over the codewords so large S_i is never materialised.
fn minimum_of(code: &BinaryCode, i: usize) -> Result<std::result::Result<Word, MinimumAbsence>> {
    // a minimum, if present, is the unique minimum-weight member
    let Some(candidate) = code.codewords()?.filter(|c| c.get(i)).min_by_key(|c| c.weight()) else {
        return Ok(Err(MinimumAbsence::DeadCoordinate));
    };
    let covered_by_all = code
        .codewords()?
        .filter(|c| c.get(i))
        .all(|c| c.bits() & candidate.bits() == candidate.bits());
    Ok(if covered_by_all { Ok(candidate) } else { Err(MinimumAbsence::NoMinimum) })
}

/// Minimum support codewords and the partition their supports induce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsStructure {
    u: Vec<Word>,
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl MdsStructure {
    /// `u_i` for every coordinate.
    pub fn u(&self) -> &[Word] {
        &self.u
    }

    /// Distinct supports `T_{i_1}, …, T_{i_s}`, ordered by smallest member.
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn s(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Index into [`parts`](Self::parts) of the part containing `j`.
    pub fn part_of(&self, j: usize) -> usize {
        self.part_of[j]
    }

    /// `|T_i|` for the part containing `j`.
    pub fn part_size(&self, j: usize) -> usize {
        self.parts[self.part_of[j]].len()
    }
}

/// Which clause of the MDS definition failed, and where.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdsFailure {
    DeadCoordinate(usize),
    NoMinimum(usize),
    NotPartition(usize),
}

impl fmt::Display for MdsFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MdsFailure::DeadCoordinate(i) => write!(f, "dead coordinate {i}"),
            MdsFailure::NoMinimum(i) => write!(f, "no minimum at coordinate {i}"),
            MdsFailure::NotPartition(i) => write!(f, "supports do not partition at coordinate {i}"),
        }
    }
}

/// Detects the MDS property. Requires `k <= 28`.
pub fn detect_mds(code: &BinaryCode) -> Result<std::result::Result<MdsStructure, MdsFailure>> {
    let n = code.n();
    // coordinates with equal columns share S_i, so compute once per class
    let mut u: Vec<Option<Word>> = vec![None; n];
    // classes come in order of first member, so the first failure is the smallest coordinate
    for class in code.column_classes() {
        let i = class[0];
        match minimum_of(code, i)? {
            Ok(w) => class.iter().for_each(|&t| u[t] = Some(w)),
            Err(MinimumAbsence::DeadCoordinate) => return Ok(Err(MdsFailure::DeadCoordinate(i))),
            Err(MinimumAbsence::NoMinimum) => return Ok(Err(MdsFailure::NoMinimum(i))),
        }
    }
    let u: Vec<Word> = u.into_iter().map(|w| w.expect("every class assigned")).collect();

    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Word> = Vec::new();
    let mut part_of = vec![usize::MAX; n];
    for t in 0..n {
        if part_of[t] != usize::MAX {
            continue;
        }
        let rep = u[t];
        if reps.iter().any(|r| r.bits() & rep.bits() != 0) {
            return Ok(Err(MdsFailure::NotPartition(t)));
        }
        let idx = parts.len();
        let members = rep.support();
        for &m in &members {
            part_of[m] = idx;
        }
        reps.push(rep);
        parts.push(members);
    }
    Ok(Ok(MdsStructure { u, parts, part_of }))
}

/// True iff for every pair `i, j`, `u_i = u_j` or their supports are disjoint.
pub fn verify_disjointness(structure: &MdsStructure) -> bool {
    let u = structure.u();
    u.iter()
        .enumerate()
        .all(|(i, a)| u[i + 1..].iter().all(|b| a == b || a.bits() & b.bits() == 0))
}

/// JSON emitted by the `mds` command.
pub fn mds_json(result: &std::result::Result<MdsStructure, MdsFailure>) -> Value {
    match result {
        Ok(s) => json!({
            "is_mds": true,
            "reason": Value::Null,
            "parts": s.parts(),
            "u": s.u().iter().map(Word::to_string).collect::<Vec<_>>(),
        }),
        Err(f) => json!({
            "is_mds": false,
            "reason": f.to_string(),
            "parts": Vec::<Vec<usize>>::new(),
            "u": Vec::<String>::new(),
        }),
    }
}
