//! Exact convex polyhedra over the rationals, not necessarily closed, and
//! finite unions of them.
//!
//! A [`Polyhedron`] is kept in a canonical constraint form: equalities in
//! reduced echelon form, irredundant inequalities reduced modulo the
//! equalities, each constraint with primitive integer coefficients. Closure
//! generators (vertices, closure points, rays, lines) are derived on demand by
//! double description and feed the integer-hull computation.

mod dd;
mod hull;
mod linear;
mod lp;
mod polyhedron;
mod set;
mod text;

pub use hull::MAX_HULL_POINTS;
pub(crate) use linear::format_expr;
pub use linear::{AtomicConstraint, Constraint, ConstraintKind, LinearTerm, Relation, VarSpace};
pub use polyhedron::{Generators, Polyhedron};
pub use set::PolyhedralSet;
pub use text::{parse_conjunction, parse_linear_term, parse_rational, TextError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("operands live in different variable spaces")]
    SpaceMismatch,
    #[error("expected a valuation of {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("`{0}` is not a clock")]
    NotAClock(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Text(#[from] TextError),
}
