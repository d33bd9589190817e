//! Exact constructions in n-angulated categories, realized over graded
//! vector spaces with Σ the degree shift.

pub mod cluster;
pub mod decompose;
pub mod engine;
pub mod error;
pub mod field;
pub mod graded;
pub mod linsys;
pub mod matrix;
pub mod rng;
pub mod sequence;
pub mod suite;
pub mod text;

pub use error::{Error, Failure, Result};
pub use field::PrimeField;
pub use graded::{shift_map, shift_object, BlockMap, GradedMap, GradedObject};
pub use linsys::{AffineSpace, LinearSystem, Term};
pub use matrix::Matrix;
pub use sequence::{direct_sum_seq, mapping_cone, trivial_seq, NSeq, SeqMorphism};
