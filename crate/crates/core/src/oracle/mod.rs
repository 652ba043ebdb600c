//! Ground truth on instantiated automata: zone-graph reachability,
//! unavoidability over maximal discrete runs, untimed trace equality, and a
//! grid checker comparing synthesized parameter sets against those verdicts.

pub mod dbm;
mod zone_graph;

use std::collections::BTreeSet;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::model::{ModelError, Pta};
use crate::poly::{PolyError, PolyhedralSet};
use crate::Rational;

pub use zone_graph::{reachable, trace_equal, unavoidable, IntegerEdge, IntegerTa, ZoneGraph};

/// Largest number of integer points `grid_check` will enumerate.
pub const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("the automaton has a non-integer constant; rescale it first")]
    NonIntegerConstant,
    #[error("a constant does not fit the zone representation")]
    ConstantTooLarge,
    #[error("the automata differ in locations or actions")]
    AlphabetMismatch,
    #[error("the parameter box has {0} integer points, more than {MAX_GRID_POINTS}")]
    BoxTooLarge(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Property checked on one instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Reach(BTreeSet<usize>),
    Unavoid(BTreeSet<usize>),
    /// Same traces as under the given valuation.
    Trace(Vec<Rational>),
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::Reach(_) => "EF",
            Check::Unavoid(_) => "AF",
            Check::Trace(_) => "TP",
        }
    }
}

/// `v(A)`, rescaled to integer constants.
pub fn integer_instance(pta: &Pta, v: &[Rational]) -> Result<IntegerTa, OracleError> {
    IntegerTa::new(&pta.instantiate(v)?.rescale())
}

/// Oracle answer for one valuation.
pub fn verdict(pta: &Pta, check: &Check, v: &[Rational]) -> Result<bool, OracleError> {
    let ta = integer_instance(pta, v)?;
    Ok(match check {
        Check::Reach(g) => reachable(&ta, g),
        Check::Unavoid(g) => unavoidable(&ta, g),
        Check::Trace(v0) => trace_equal(&integer_instance(pta, v0)?, &ta)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub valuation: Vec<Rational>,
    pub oracle: bool,
    pub member: bool,
}

impl GridPoint {
    pub fn agrees(&self) -> bool {
        self.oracle == self.member
    }

    /// In the set although the property fails.
    pub fn unsound(&self) -> bool {
        self.member && !self.oracle
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridReport {
    pub property: String,
    pub params: Vec<String>,
    /// Every integer point of the box, in lexicographic order.
    pub integer: Vec<GridPoint>,
    /// Non-integer samples; only soundness is expected of them.
    pub rational: Vec<GridPoint>,
}

fn valuation_text(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl GridReport {
    pub fn disagreements(&self) -> Vec<&GridPoint> {
        self.integer.iter().filter(|p| !p.agrees()).collect()
    }

    pub fn soundness_violations(&self) -> Vec<&GridPoint> {
        self.rational.iter().filter(|p| p.unsound()).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.disagreements().is_empty() && self.soundness_violations().is_empty()
    }

    pub fn to_json(&self) -> Value {
        let point = |p: &GridPoint| {
            json!({
                "valuation": p.valuation.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "oracle": p.oracle,
                "member": p.member,
                "agrees": p.agrees(),
            })
        };
        json!({
            "property": self.property,
            "params": self.params,
            "integer_points": self.integer.iter().map(point).collect::<Vec<_>>(),
            "rational_samples": self.rational.iter().map(point).collect::<Vec<_>>(),
            "disagreements": self.disagreements().len(),
            "soundness_violations": self.soundness_violations().len(),
        })
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} check over ({})", self.property, self.params.join(", "));
        let _ = writeln!(out, "{:<24} {:>7} {:>7}  note", "valuation", "oracle", "member");
        for (kind, points) in [("", &self.integer), ("rational", &self.rational)] {
            for p in points {
                let note = if kind.is_empty() {
                    if p.agrees() { "" } else { "DISAGREE" }
                } else if p.unsound() {
                    "UNSOUND"
                } else {
                    "rational"
                };
                let _ = writeln!(
                    out,
                    "{:<24} {:>7} {:>7}  {note}",
                    format!("({})", valuation_text(&p.valuation)),
                    p.oracle,
                    p.member
                );
            }
        }
        let _ = writeln!(
            out,
            "{} integer points, {} disagreements; {} rational samples, {} soundness violations",
            self.integer.len(),
            self.disagreements().len(),
            self.rational.len(),
            self.soundness_violations().len()
        );
        out
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Every integer point of the box, lexicographically.
pub fn integer_points(pta: &Pta) -> Result<Vec<Vec<Rational>>, OracleError> {
    let mut count: usize = 1;
    for b in &pta.bounds {
        let width = (b.upper - b.lower + 1).to_usize().unwrap_or(usize::MAX);
        count = count.saturating_mul(width);
    }
    if count > MAX_GRID_POINTS {
        return Err(OracleError::BoxTooLarge(count));
    }
    let mut points = vec![Vec::new()];
    for b in &pta.bounds {
        points = points
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                (b.lower..=b.upper).map(move |k| {
                    let mut q = p.clone();
                    q.push(int(k));
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Up to `n` points of the box with denominators 2, 3 or 4 and at least one
/// non-integer coordinate, spread evenly over their lexicographic order.
pub fn rational_samples(pta: &Pta, n: usize) -> Vec<Vec<Rational>> {
    if n == 0 || pta.params.is_empty() {
        return Vec::new();
    }
    let mut all: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for d in 2..=4i64 {
        let mut points = vec![Vec::new()];
        for b in &pta.bounds {
            points = points
                .into_iter()
                .flat_map(|p: Vec<Rational>| {
                    (b.lower * d..=b.upper * d).map(move |k| {
                        let mut q = p.clone();
                        q.push(Rational::new(BigInt::from(k), BigInt::from(d)));
                        q
                    })
                })
                .collect();
            if points.len() > 4 * MAX_GRID_POINTS {
                break;
            }
        }
        all.extend(points.into_iter().filter(|p| p.len() == pta.params.len() && p.iter().any(|x| !x.is_integer())));
    }
    let all: Vec<_> = all.into_iter().collect();
    if all.len() <= n {
        return all;
    }
    (0..n).map(|i| all[i * all.len() / n].clone()).collect()
}

/// Compares `result` with the oracle on every integer point of the box and on
/// `samples` rational points.
pub fn grid_check(pta: &Pta, check: &Check, result: &PolyhedralSet, samples: usize) -> Result<GridReport, OracleError> {
    let point = |v: Vec<Rational>| -> Result<GridPoint, OracleError> {
        Ok(GridPoint {
            oracle: verdict(pta, check, &v)?,
            member: result.contains(&v)?,
            valuation: v,
        })
    };
    let integer = integer_points(pta)?.into_iter().map(point).collect::<Result<Vec<_>, _>>()?;
    let rational = rational_samples(pta, samples)
        .into_iter()
        .map(point)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridReport {
        property: check.name().to_string(),
        params: pta.params.clone(),
        integer,
        rational,
    })
}
