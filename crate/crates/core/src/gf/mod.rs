//! Finite fields GF(p^m) and dense exact linear algebra over them.

mod field;
mod matrix;
pub mod numtheory;
mod poly;
mod prime_poly;

pub use field::{
    gf_make, Field, FieldElement, FieldSpec, FieldSpecJson, ModulusChoice, DEFAULT_TRIAL_LIMIT,
};
pub use matrix::{rank, solve_right, solve_right_with_stats, DenseMatrix, SolveOutcome, SolveStats};
pub use poly::{det_poly, Poly};
