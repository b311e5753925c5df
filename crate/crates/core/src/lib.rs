//! Exact erasure-channel influences of binary linear codes.
//!
//! Codewords are words of length `n <= 63` packed into a `u64`, coordinate
//! `i` in bit `i`. Functions of `x ∈ F_2^n` are stored as bit tables indexed
//! by the integer whose bit `i` is `x_i`.

mod bits;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod hypercube;
pub mod influence;
pub mod poly;
pub mod recovery;
pub mod report;
pub mod suites;
pub mod structure;

pub use codes::{BinaryCode, CodeSpec, Family, Partition};
pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Word};
pub use hypercube::{BruteForceCap, IndicatorMap, WeightProfile};
pub use poly::InfluencePoly;
pub use structure::{MdsFailure, MdsStructure};
