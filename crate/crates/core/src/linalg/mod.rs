pub mod field;
pub mod integer;
pub mod matrix;
pub mod ring;

pub use field::{Field, FieldMatrix, PrimeField, Rationals};
pub use integer::{smith_normal_form, IntegerMatrix, SnfResult};
pub use matrix::{rational, Matrix};
pub use ring::{HomologyData, Ring};
