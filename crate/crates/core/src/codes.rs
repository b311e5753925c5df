//! Binary linear codes and the constructions studied here: repetition,
//! distinct-weight, hybrid (block-indicator), simple parity-check, and
//! tensor products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, MatrixJson, Word};

/// Largest dimension for which codewords are enumerated explicitly.
pub const ENUMERATION_CAP: usize = 28;

/// Construction provenance, carried so closed forms can dispatch on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Family {
    Repetition { r: usize, k: usize },
    DistinctWeight { r: usize, k: usize },
    Hybrid { parts: Vec<Vec<usize>> },
    ParityCheck { n: usize },
    Product { left: Box<Family>, right: Box<Family> },
    Generic,
}

/// A partition of `0..n` into disjoint nonempty parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates that `parts` cover `0..n` exactly once, where `n` is the
    /// total number of indices.
    pub fn new(parts: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = parts.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::InvalidPartition("no indices".into()));
        }
        if n > Word::MAX_LEN {
            return Err(Error::LengthOverCap { n });
        }
        let mut seen = vec![false; n];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidPartition("empty part".into()));
            }
            for &i in part {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("index {i} outside 0..{n}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
            }
        }
        Ok(Partition { n, parts })
    }

    /// Consecutive blocks of the given sizes.
    pub fn consecutive(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let parts = sizes
            .iter()
            .map(|&s| {
                let p = (start..start + s).collect();
                start += s;
                p
            })
            .collect();
        Self::new(parts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }
}

/// A binary linear code given by a (possibly redundant) generator matrix.
#[derive(Clone, Debug)]
pub struct BinaryCode {
    generator: Gf2Matrix,
    basis: Vec<Word>,
    pivots: Vec<usize>,
    family: Family,
}

impl BinaryCode {
    fn build(generator: Gf2Matrix, family: Family) -> Self {
        let rref = generator.rref();
        let basis = rref.matrix.rows()[..rref.rank].to_vec();
        BinaryCode { generator, basis, pivots: rref.pivots, family }
    }

    pub fn n(&self) -> usize {
        self.generator.col_count()
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn generator(&self) -> &Gf2Matrix {
        &self.generator
    }

    /// Reduced-row-echelon basis rows (`k` of them).
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::new(self.n(), self.basis.clone()).expect("basis rows share the code length")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn contains(&self, w: &Word) -> bool {
        if w.len() != self.n() {
            return false;
        }
        let mut bits = w.bits();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if (bits >> p) & 1 == 1 {
                bits ^= row.bits();
            }
        }
        bits == 0
    }

    /// Encodes a message of `k` bits against the reduced basis.
    pub fn encode(&self, message: u64) -> Word {
        let mut bits = 0;
        for (r, row) in self.basis.iter().enumerate() {
            if (message >> r) & 1 == 1 {
                bits ^= row.bits();
            }
        }
        Word::from_bits(bits, self.n()).expect("basis rows have code length")
    }

    /// Iterates all `2^k` codewords in Gray-code order (starting at zero).
    pub fn codewords(&self) -> Result<impl Iterator<Item = Word> + '_> {
        let k = self.k();
        if k > ENUMERATION_CAP {
            return Err(Error::DimensionOverCap { k, limit: ENUMERATION_CAP });
        }
        let n = self.n();
        let total = 1u64 << k;
        let mut cur = 0u64;
        Ok((0..total).map(move |i| {
            if i > 0 {
                cur ^= self.basis[i.trailing_zeros() as usize].bits();
            }
            Word::from_bits(cur, n).expect("codeword has code length")
        }))
    }

    /// Column `i` of the reduced basis packed into a `u64`. Two coordinates
    /// have the same `S_i` iff their keys are equal.
    pub fn column_key(&self, i: usize) -> u64 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, row)| row.get(i))
            .fold(0, |acc, (r, _)| acc | 1 << r)
    }

    /// Groups coordinates with identical columns, in order of first appearance.
    pub fn column_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<(u64, Vec<usize>)> = Vec::new();
        for i in 0..self.n() {
            let key = self.column_key(i);
            match classes.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(i),
                None => classes.push((key, vec![i])),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    }

    pub fn check_coordinate(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        Ok(())
    }

    /// Same code with columns reordered; new coordinate `c` is old `perm[c]`.
    pub fn permute(&self, perm: &[usize]) -> Result<BinaryCode> {
        Ok(Self::build(self.generator.permute_columns(perm)?, Family::Generic))
    }
}

pub fn repetition_code(r: usize, k: usize) -> Result<BinaryCode> {
    if r == 0 || k == 0 {
        return Err(Error::InvalidParameters("repetition code needs r >= 1 and k >= 1".into()));
    }
    let mut code = hybrid_code(&Partition::consecutive(&vec![r; k])?)?;
    code.family = Family::Repetition { r, k };
    Ok(code)
}

/// Block-diagonal code with blocks of `2^r, 2^{r+1}, …, 2^{r+k-1}` ones.
///
/// The `[28,3,4]` code with blocks `(4, 8, 16)` is `distinct_weight_code(2, 3)`;
/// some texts label it with the subscripts swapped.
pub fn distinct_weight_code(r: usize, k: usize) -> Result<BinaryCode> {
    if k == 0 {
        return Err(Error::InvalidParameters("distinct-weight code needs k >= 1".into()));
    }
    // n = 2^{r+k} - 2^r fits in a word only when r + k <= 6
    if r + k > 6 {
        let n = 1usize
            .checked_shl((r + k) as u32)
            .map_or(usize::MAX, |hi| hi - (1 << r));
        return Err(Error::LengthOverCap { n });
    }
    let sizes: Vec<usize> = (0..k).map(|i| 1 << (r + i)).collect();
    let mut code = hybrid_code(&Partition::consecutive(&sizes)?)?;
    code.family = Family::DistinctWeight { r, k };
    Ok(code)
}

/// Generator row `i` is the indicator of part `A_i`.
pub fn hybrid_code(partition: &Partition) -> Result<BinaryCode> {
    let n = partition.n();
    let rows = partition
        .parts()
        .iter()
        .map(|p| Word::from_support(n, p.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BinaryCode::build(
        Gf2Matrix::new(n, rows)?,
        Family::Hybrid { parts: partition.parts().to_vec() },
    ))
}

/// Even-weight code of length `n`, generator rows `e_i + e_{n-1}`.
pub fn parity_check_code(n: usize) -> Result<BinaryCode> {
    if !(2..=Word::MAX_LEN).contains(&n) {
        return Err(Error::InvalidParameters(format!("parity-check length {n} outside 2..=63")));
    }
    let rows = (0..n - 1)
        .map(|i| Word::from_support(n, [i, n - 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(BinaryCode::build(Gf2Matrix::new(n, rows)?, Family::ParityCheck { n }))
}

/// Tensor product with generator `G1 ⊗ G2`; coordinate `(r, t)` is `r·n2 + t`.
pub fn product(c1: &BinaryCode, c2: &BinaryCode) -> Result<BinaryCode> {
    let generator = c1.generator().kronecker(c2.generator())?;
    Ok(BinaryCode::build(
        generator,
        Family::Product {
            left: Box::new(c1.family.clone()),
            right: Box::new(c2.family.clone()),
        },
    ))
}

/// Code spanned by the rows of `m`; redundant rows are kept as given.
pub fn from_matrix(m: &Gf2Matrix) -> BinaryCode {
    BinaryCode::build(m.clone(), Family::Generic)
}

pub fn min_distance(code: &BinaryCode) -> Result<u32> {
    code.codewords()?
        .filter(|c| !c.is_zero())
        .map(|c| c.weight())
        .min()
        .ok_or(Error::TrivialCode)
}

/// Input description of a code, as accepted by the command-line tools.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSpec {
    Matrix { n: usize, rows: Vec<String> },
    Repetition { r: usize, k: usize },
    DistinctWeight { r: usize, k: usize },
    Hybrid { parts: Vec<Vec<usize>> },
    ParityCheck { n: usize },
    Product { left: Box<CodeSpec>, right: Box<CodeSpec> },
}

impl CodeSpec {
    pub fn build(&self) -> Result<BinaryCode> {
        match self {
            CodeSpec::Matrix { n, rows } => {
                let m = Gf2Matrix::from_json(&MatrixJson { n: *n, rows: rows.clone() })?;
                Ok(from_matrix(&m))
            }
            CodeSpec::Repetition { r, k } => repetition_code(*r, *k),
            CodeSpec::DistinctWeight { r, k } => distinct_weight_code(*r, *k),
            CodeSpec::Hybrid { parts } => hybrid_code(&Partition::new(parts.clone())?),
            CodeSpec::ParityCheck { n } => parity_check_code(*n),
            CodeSpec::Product { left, right } => product(&left.build()?, &right.build()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn words(code: &BinaryCode) -> BTreeSet<String> {
        code.codewords().unwrap().map(|w| w.to_string()).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn repetition_parameters() {
        let c = repetition_code(3, 5).unwrap();
        assert_eq!((c.n(), c.k()), (15, 5));
        assert_eq!(min_distance(&c).unwrap(), 3);

        let full = repetition_code(1, 6).unwrap();
        assert_eq!(full.k(), 6);
        assert_eq!(full.codewords().unwrap().count(), 64);

        let c = repetition_code(2, 3).unwrap();
        assert_eq!(
            words(&c),
            set(&["000000", "110000", "001100", "000011", "111100", "110011", "001111", "111111"])
        );
        assert!(repetition_code(8, 8).is_err());
        assert!(repetition_code(0, 2).is_err());
    }

    #[test]
    fn distinct_weight_parameters() {
        let c = distinct_weight_code(2, 3).unwrap();
        assert_eq!((c.n(), c.k()), (28, 3));
        assert_eq!(min_distance(&c).unwrap(), 4);
        let weights: BTreeSet<u32> = c.codewords().unwrap().map(|w| w.weight()).collect();
        assert_eq!(weights, (0..8).map(|i| 4 * i).collect());

        assert_eq!(words(&distinct_weight_code(0, 1).unwrap()), set(&["0", "1"]));

        let c = distinct_weight_code(1, 2).unwrap();
        assert_eq!((c.n(), c.k()), (6, 2));
        let weights: BTreeSet<u32> = c.codewords().unwrap().map(|w| w.weight()).collect();
        assert_eq!(weights, BTreeSet::from([0, 2, 4, 6]));

        assert!(matches!(distinct_weight_code(3, 4), Err(Error::LengthOverCap { .. })));
    }

    #[test]
    fn distinct_weight_map_is_injective() {
        for (r, k) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 2), (2, 3), (0, 5)] {
            let c = distinct_weight_code(r, k).unwrap();
            let weights: BTreeSet<u32> = c.codewords().unwrap().map(|w| w.weight()).collect();
            assert_eq!(weights.len(), 1 << k);
        }
    }

    #[test]
    fn hybrid_examples() {
        let c = hybrid_code(&Partition::new(vec![vec![0, 1], (2..7).collect()]).unwrap()).unwrap();
        assert_eq!(c.generator().rows()[0].to_string(), "1100000");
        assert_eq!(c.generator().rows()[1].to_string(), "0011111");

        let singletons = Partition::new((0..5).map(|i| vec![i]).collect()).unwrap();
        let c = hybrid_code(&singletons).unwrap();
        assert_eq!(c.generator(), &Gf2Matrix::identity(5).unwrap());

        let c = hybrid_code(&Partition::consecutive(&[4, 8, 16]).unwrap()).unwrap();
        assert_eq!(c.generator(), distinct_weight_code(2, 3).unwrap().generator());

        for (r, k) in [(1, 3), (2, 4), (3, 5), (5, 2)] {
            let parts = Partition::consecutive(&vec![r; k]).unwrap();
            assert_eq!(
                hybrid_code(&parts).unwrap().generator(),
                repetition_code(r, k).unwrap().generator()
            );
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(vec![vec![0], vec![]]).is_err());
        assert!(Partition::new(vec![vec![0, 3]]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![vec![2, 0], vec![1]]).is_ok());
    }

    #[test]
    fn parity_check_parameters() {
        let c = parity_check_code(10).unwrap();
        assert_eq!((c.n(), c.k()), (10, 9));
        assert_eq!(words(&parity_check_code(2).unwrap()), set(&["00", "11"]));
        let c = parity_check_code(4).unwrap();
        let all: Vec<Word> = c.codewords().unwrap().collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|w| w.weight() % 2 == 0));
        assert_eq!(min_distance(&parity_check_code(6).unwrap()).unwrap(), 2);
        assert!(parity_check_code(1).is_err());
    }

    #[test]
    fn products() {
        let r2 = repetition_code(2, 1).unwrap();
        let c = product(&r2, &r2).unwrap();
        assert_eq!(words(&c), set(&["0000", "1111"]));

        let c = product(&repetition_code(2, 2).unwrap(), &repetition_code(3, 1).unwrap()).unwrap();
        assert_eq!((c.n(), c.k()), (12, 2));
        let weights: BTreeSet<u32> = c.codewords().unwrap().map(|w| w.weight()).collect();
        assert_eq!(weights, BTreeSet::from([0, 6, 12]));

        let big = repetition_code(8, 1).unwrap();
        assert!(product(&big, &big).is_err());
    }

    #[test]
    fn from_matrix_examples() {
        let g = Gf2Matrix::from_strings(&["100010101", "010010110", "001001100", "000111111"]).unwrap();
        let c = from_matrix(&g);
        assert_eq!((c.n(), c.k()), (9, 4));
        assert!(c.contains(&Word::parse("110000011").unwrap()));

        let zero = from_matrix(&Gf2Matrix::from_strings(&["0000", "0000"]).unwrap());
        assert_eq!(zero.k(), 0);
        assert_eq!(words(&zero), set(&["0000"]));
        assert_eq!(min_distance(&zero), Err(Error::TrivialCode));

        let toy = from_matrix(&Gf2Matrix::from_strings(&["11100", "00111"]).unwrap());
        assert_eq!(words(&toy), set(&["11100", "00111", "11011", "00000"]));
        assert_eq!(min_distance(&toy).unwrap(), 3);

        let redundant = Gf2Matrix::from_strings(&["110", "011", "101"]).unwrap();
        let c = from_matrix(&redundant);
        assert_eq!(c.generator().row_count(), 3);
        assert_eq!(c.k(), 2);
    }

    #[test]
    fn constructors_report_advertised_rank() {
        assert_eq!(repetition_code(4, 3).unwrap().generator().rank(), 3);
        assert_eq!(distinct_weight_code(1, 3).unwrap().generator().rank(), 3);
        assert_eq!(parity_check_code(9).unwrap().generator().rank(), 8);
        let p = product(&repetition_code(2, 2).unwrap(), &parity_check_code(3).unwrap()).unwrap();
        assert_eq!(p.k(), 2 * 2);
    }

    #[test]
    fn spec_json() {
        let spec: CodeSpec = serde_json::from_str(
            r#"{"type":"product","left":{"type":"repetition","r":2,"k":2},"right":{"type":"parity_check","n":3}}"#,
        )
        .unwrap();
        let c = spec.build().unwrap();
        assert_eq!((c.n(), c.k()), (12, 4));

        let spec: CodeSpec = serde_json::from_str(r#"{"type":"hybrid","parts":[[0,1],[2,3,4]]}"#).unwrap();
        assert_eq!(spec.build().unwrap().k(), 2);

        assert!(serde_json::from_str::<CodeSpec>(r#"{"type":"repetition","r":2}"#).is_err());
        assert!(serde_json::from_str::<CodeSpec>(r#"{"type":"nope"}"#).is_err());
    }
}
