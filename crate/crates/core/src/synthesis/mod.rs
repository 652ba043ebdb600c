//! Parameter synthesis: reachability, unavoidability and trace preservation,
//! each in a terminating integer-hull form, a budgeted reference form keyed on
//! raw symbolic states, and (for the first two) an integer-only comparison form.

mod dot;
mod explorer;

use std::collections::BTreeSet;
use std::time::Duration;

use thiserror::Error;

use crate::model::Pta;
use crate::poly::{PolyError, PolyhedralSet};
use crate::Rational;

pub use dot::{ExplorationTrace, TraceNode};

/// Key ceiling per location used when the environment does not override it.
pub const DEFAULT_STATE_CEILING: usize = 200_000;
/// Budget of the reference variants when none is given.
pub const DEFAULT_BUDGET: usize = 10_000;
pub const CEILING_ENV: &str = "POLYPARAM_STATE_CEILING";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Property {
    /// Some location of the set is reachable.
    Reach(BTreeSet<usize>),
    /// Every maximal run visits the set.
    Unavoid(BTreeSet<usize>),
    /// Same trace set as under the reference valuation.
    TracePreserve(Vec<Rational>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Passed keyed on integer hulls of extrapolated states; always terminates.
    Hull,
    /// Passed keyed on raw states; needs a budget.
    Reference,
    /// Hull control flow returning integer hulls at goals; meaningful on integer points only.
    Integer,
}

/// The eight named algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rief,
    Riaf,
    Ritp,
    Ef,
    Af,
    Tp,
    Ief,
    Iaf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Rief,
        Algorithm::Riaf,
        Algorithm::Ritp,
        Algorithm::Ef,
        Algorithm::Af,
        Algorithm::Tp,
        Algorithm::Ief,
        Algorithm::Iaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rief => "rief",
            Algorithm::Riaf => "riaf",
            Algorithm::Ritp => "ritp",
            Algorithm::Ef => "ef",
            Algorithm::Af => "af",
            Algorithm::Tp => "tp",
            Algorithm::Ief => "ief",
            Algorithm::Iaf => "iaf",
        }
    }

    pub fn from_name(s: &str) -> Option<Algorithm> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn variant(self) -> Variant {
        match self {
            Algorithm::Rief | Algorithm::Riaf | Algorithm::Ritp => Variant::Hull,
            Algorithm::Ef | Algorithm::Af | Algorithm::Tp => Variant::Reference,
            Algorithm::Ief | Algorithm::Iaf => Variant::Integer,
        }
    }

    /// `"EF"`, `"AF"` or `"TP"`.
    pub fn property_kind(self) -> &'static str {
        match self {
            Algorithm::Rief | Algorithm::Ef | Algorithm::Ief => "EF",
            Algorithm::Riaf | Algorithm::Af | Algorithm::Iaf => "AF",
            Algorithm::Ritp | Algorithm::Tp => "TP",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisRequest<'a> {
    pub pta: &'a Pta,
    pub property: Property,
    pub variant: Variant,
    pub budget: Option<usize>,
    pub record_trace: bool,
}

impl<'a> SynthesisRequest<'a> {
    pub fn new(pta: &'a Pta, property: Property, variant: Variant) -> Self {
        SynthesisRequest {
            pta,
            property,
            variant,
            budget: None,
            record_trace: false,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    BudgetExhausted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub states_explored: usize,
    pub cache_hits: usize,
    pub passed_hits: usize,
    /// Largest number of distinct keys seen at one location.
    pub max_keys_per_location: usize,
    pub max_constant: i64,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    /// Parameter valuations, inside the parameter box.
    pub valuations: PolyhedralSet,
    pub status: Status,
    pub stats: Stats,
    pub trace: Option<ExplorationTrace>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("location `{location}` exceeded the ceiling of {ceiling} distinct state keys")]
    CeilingExceeded { location: String, ceiling: usize },
}

/// Runs the requested algorithm from the initial state.
pub fn synthesize(req: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError> {
    explorer::run(req)
}

/// Hull-variant reachability.
pub fn synth_reach(pta: &Pta, goals: BTreeSet<usize>) -> Result<SynthesisResult, SynthesisError> {
    synthesize(&SynthesisRequest::new(pta, Property::Reach(goals), Variant::Hull))
}

/// Hull-variant unavoidability.
pub fn synth_unavoid(pta: &Pta, goals: BTreeSet<usize>) -> Result<SynthesisResult, SynthesisError> {
    synthesize(&SynthesisRequest::new(pta, Property::Unavoid(goals), Variant::Hull))
}

/// Hull-variant trace preservation around an integer reference valuation.
pub fn synth_trace_preserve(pta: &Pta, v0: Vec<Rational>) -> Result<SynthesisResult, SynthesisError> {
    synthesize(&SynthesisRequest::new(pta, Property::TracePreserve(v0), Variant::Hull))
}

/// Key ceiling in effect: the environment override or the default.
pub fn state_ceiling() -> usize {
    std::env::var(CEILING_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CEILING)
}
