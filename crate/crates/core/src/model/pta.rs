use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::ModelError;
use crate::poly::{AtomicConstraint, Constraint, ConstraintKind, LinearTerm, Polyhedron, Relation, VarSpace};

/// `clock rel bound`, where `bound` only mentions parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockAtom {
    pub clock: usize,
    pub rel: Relation,
    pub bound: LinearTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub guard: Vec<ClockAtom>,
    pub action: String,
    pub resets: Vec<usize>,
    pub target: usize,
}

/// Closed integer interval of one parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamBounds {
    pub lower: i64,
    pub upper: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pta {
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub bounds: Vec<ParamBounds>,
    pub locations: Vec<String>,
    pub initial: usize,
    pub invariants: Vec<Vec<ClockAtom>>,
    pub edges: Vec<Edge>,
}

/// Constants beyond this magnitude are rejected so that the oracle can use machine integers.
pub const MAX_MODEL_CONSTANT: i64 = 1 << 30;

impl Pta {
    pub fn space(&self) -> VarSpace {
        VarSpace::new(self.clocks.clone(), self.params.clone()).expect("validated names")
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn actions(&self) -> BTreeSet<&str> {
        self.edges.iter().map(|e| e.action.as_str()).collect()
    }

    pub fn outgoing(&self, loc: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == loc)
    }

    pub fn atom_constraint(&self, atom: &ClockAtom) -> AtomicConstraint {
        AtomicConstraint::compare(LinearTerm::var(self.clocks[atom.clock].clone()), atom.rel, atom.bound.clone())
    }

    /// Conjunction of atoms as a polyhedron over `space` (clocks then parameters).
    pub fn conjunction(&self, space: &VarSpace, atoms: &[ClockAtom]) -> Polyhedron {
        let a: Vec<AtomicConstraint> = atoms.iter().map(|a| self.atom_constraint(a)).collect();
        Polyhedron::new(space, &a).expect("validated atoms")
    }

    pub fn invariant(&self, space: &VarSpace, loc: usize) -> Polyhedron {
        self.conjunction(space, &self.invariants[loc])
    }

    pub fn guard(&self, space: &VarSpace, edge: &Edge) -> Polyhedron {
        self.conjunction(space, &edge.guard)
    }

    /// Bounds `lower ≤ p ≤ upper` for every parameter, over `space`.
    pub fn param_box(&self, space: &VarSpace) -> Polyhedron {
        let mut cons = Vec::new();
        for (i, b) in self.bounds.iter().enumerate() {
            let c = space.param_coord(i);
            let mut lo = vec![BigInt::zero(); space.dim()];
            lo[c] = BigInt::from(-1);
            cons.push(Constraint::new(lo, BigInt::from(b.lower), ConstraintKind::Le));
            let mut hi = vec![BigInt::zero(); space.dim()];
            hi[c] = BigInt::from(1);
            cons.push(Constraint::new(hi, BigInt::from(-b.upper), ConstraintKind::Le));
        }
        Polyhedron::from_constraints(space, cons)
    }

    /// `{clocks ≥ 0}` over `space`.
    pub fn clocks_nonnegative(&self, space: &VarSpace) -> Polyhedron {
        let cons = (0..space.num_clocks())
            .map(|i| {
                let mut v = vec![BigInt::zero(); space.dim()];
                v[i] = BigInt::from(-1);
                Constraint::new(v, BigInt::zero(), ConstraintKind::Le)
            })
            .collect();
        Polyhedron::from_constraints(space, cons)
    }

    /// Largest value of an atom's bound over the parameter box.
    pub fn atom_maximum(&self, atom: &ClockAtom) -> BigInt {
        let mut m = atom.bound.constant_part().clone();
        for (name, a) in atom.bound.coeffs() {
            let i = self.params.iter().position(|p| p == name).expect("validated parameter");
            let b = &self.bounds[i];
            m += a * BigInt::from(if a.is_positive() { b.upper } else { b.lower });
        }
        m
    }

    fn all_atoms(&self) -> impl Iterator<Item = &ClockAtom> {
        self.invariants.iter().flatten().chain(self.edges.iter().flat_map(|e| e.guard.iter()))
    }

    /// `M = 1 + max(atom maxima, parameter upper bounds, 0)`.
    pub fn max_constant(&self) -> i64 {
        let mut m = BigInt::zero();
        for a in self.all_atoms() {
            m = m.max(self.atom_maximum(a));
        }
        for b in &self.bounds {
            m = m.max(BigInt::from(b.upper));
        }
        (m + 1u32).to_i64().expect("validated constant range")
    }

    /// Checks structural well-formedness; returns warnings on success.
    pub fn validate(&self) -> Result<Vec<String>, ModelError> {
        let mut errors = Vec::new();
        if let Err(e) = VarSpace::new(self.clocks.clone(), self.params.clone()) {
            errors.push(e.to_string());
        }
        let mut seen = BTreeSet::new();
        for l in &self.locations {
            if !seen.insert(l) {
                errors.push(format!("duplicate location `{l}`"));
            }
        }
        if self.locations.is_empty() {
            errors.push("no locations declared".into());
        }
        if self.initial >= self.locations.len() {
            errors.push("initial location is not declared".into());
        }
        if self.bounds.len() != self.params.len() {
            errors.push("every parameter needs bounds".into());
        }
        for (p, b) in self.params.iter().zip(&self.bounds) {
            if b.lower < 0 || b.lower > b.upper {
                errors.push(format!("parameter `{p}` has invalid bounds [{}, {}]", b.lower, b.upper));
            }
            if b.upper > MAX_MODEL_CONSTANT {
                errors.push(format!("parameter `{p}` bound exceeds {MAX_MODEL_CONSTANT}"));
            }
        }
        if self.invariants.len() != self.locations.len() {
            errors.push("one invariant per location expected".into());
        }
        let check_atom = |a: &ClockAtom, errors: &mut Vec<String>| {
            if a.clock >= self.clocks.len() {
                errors.push(format!("unknown clock #{}", a.clock));
            }
            for (name, c) in a.bound.coeffs() {
                if !self.params.contains(name) {
                    errors.push(format!("`{name}` is not a parameter"));
                }
                if c.abs() > BigInt::from(MAX_MODEL_CONSTANT) {
                    errors.push("coefficient too large".into());
                }
            }
            if a.bound.constant_part().abs() > BigInt::from(MAX_MODEL_CONSTANT) {
                errors.push("constant too large".into());
            }
        };
        for a in self.invariants.iter().flatten() {
            check_atom(a, &mut errors);
        }
        for e in &self.edges {
            if e.source >= self.locations.len() || e.target >= self.locations.len() {
                errors.push(format!("edge `{}` refers to an undeclared location", e.action));
            }
            for &r in &e.resets {
                if r >= self.clocks.len() {
                    errors.push(format!("edge `{}` resets an unknown clock", e.action));
                }
            }
            for a in &e.guard {
                check_atom(a, &mut errors);
            }
        }
        if !errors.is_empty() {
            return Err(ModelError::Invalid(errors));
        }

        let mut warnings = Vec::new();
        let space = self.space();
        let zero: Vec<Constraint> = (0..space.num_clocks())
            .map(|i| {
                let mut v = vec![BigInt::zero(); space.dim()];
                v[i] = BigInt::from(1);
                Constraint::new(v, BigInt::zero(), ConstraintKind::Eq)
            })
            .collect();
        let start = self
            .param_box(&space)
            .intersect(&self.invariant(&space, self.initial))
            .expect("same space")
            .with_constraints(zero);
        if start.is_empty() {
            warnings.push(format!(
                "the initial state is empty for every parameter valuation (invariant of `{}` excludes the zero clock valuation)",
                self.locations[self.initial]
            ));
        }
        Ok(warnings)
    }
}
