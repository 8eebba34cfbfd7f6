//! Exact scalar arithmetic: rationals, multivariate polynomials with
//! rational coefficients, square matrices over both, and an expression parser.

pub mod matrix;
pub mod parse;
pub mod poly;
pub mod rational;

use thiserror::Error;

pub use matrix::{solve_linear, vec_ops, PolyMatrix, PolyVec, RationalMatrix};
pub use parse::{parse_expr, ParseError, ParseErrorKind};
pub use poly::{Monomial, Polynomial, VarList, Vars};
pub use rational::{format_rational, int, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error(transparent)]
    Parse(#[from] ParseError),
}
