//! Bounded parametric timed automata: data model, model files, instantiation.

mod concrete;
mod parser;
mod pta;

pub use concrete::{ConcreteAtom, ConcreteEdge, ConcreteTa};
pub use parser::{parse_model, print_model};
pub use pta::{ClockAtom, Edge, ParamBounds, Pta, MAX_MODEL_CONSTANT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid model: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Valuation(String),
}
