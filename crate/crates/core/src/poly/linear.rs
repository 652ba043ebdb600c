//! Variable spaces, linear terms and atomic constraints.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::PolyError;
use crate::Rational;

/// Ordered variable space: clocks first, then parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSpace {
    clocks: Arc<[String]>,
    params: Arc<[String]>,
}

impl VarSpace {
    pub fn new<C, P>(clocks: C, params: P) -> Result<Self, PolyError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let clocks: Vec<String> = clocks.into_iter().map(Into::into).collect();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for name in clocks.iter().chain(params.iter()) {
            if !seen.insert(name.as_str()) {
                return Err(PolyError::DuplicateVariable(name.clone()));
            }
        }
        Ok(VarSpace {
            clocks: clocks.into(),
            params: params.into(),
        })
    }

    /// The parameter-only space obtained by dropping every clock.
    pub fn params_only(&self) -> VarSpace {
        VarSpace {
            clocks: Arc::from(Vec::<String>::new()),
            params: self.params.clone(),
        }
    }

    /// The clock-only space obtained by dropping every parameter.
    pub fn clocks_only(&self) -> VarSpace {
        VarSpace {
            clocks: self.clocks.clone(),
            params: Arc::from(Vec::<String>::new()),
        }
    }

    pub fn clocks(&self) -> &[String] {
        &self.clocks
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn dim(&self) -> usize {
        self.clocks.len() + self.params.len()
    }

    pub fn is_clock(&self, index: usize) -> bool {
        index < self.clocks.len()
    }

    pub fn name(&self, index: usize) -> &str {
        if index < self.clocks.len() {
            &self.clocks[index]
        } else {
            &self.params[index - self.clocks.len()]
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.clocks
            .iter()
            .chain(self.params.iter())
            .position(|n| n == name)
    }

    pub fn clock_index(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|n| n == name)
    }

    /// Coordinate of parameter `i` (0-based among parameters).
    pub fn param_coord(&self, i: usize) -> usize {
        self.clocks.len() + i
    }

    pub(crate) fn same(&self, other: &VarSpace) -> bool {
        (Arc::ptr_eq(&self.clocks, &other.clocks) || self.clocks == other.clocks)
            && (Arc::ptr_eq(&self.params, &other.params) || self.params == other.params)
    }
}

/// Relation of an atomic constraint `term ⋈ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    /// The relation obtained by swapping both sides.
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
            Relation::Gt => Relation::Lt,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Linear term `Σ αᵢ·vᵢ + d` with integer coefficients over named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
}

impl LinearTerm {
    pub fn constant(value: impl Into<BigInt>) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: value.into(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::zero().plus_var(name, 1)
    }

    pub fn zero() -> Self {
        LinearTerm::default()
    }

    pub fn plus_var(mut self, name: impl Into<String>, coeff: impl Into<BigInt>) -> Self {
        self.add_var(name.into(), coeff.into());
        self
    }

    pub fn plus_const(mut self, value: impl Into<BigInt>) -> Self {
        self.constant += value.into();
        self
    }

    pub(crate) fn add_var(&mut self, name: String, coeff: BigInt) {
        let entry = self.coeffs.entry(name).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.retain(|_, c| !c.is_zero());
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<String, BigInt> {
        &self.coeffs
    }

    pub fn coeff(&self, name: &str) -> BigInt {
        self.coeffs.get(name).cloned().unwrap_or_default()
    }

    pub fn constant_part(&self) -> &BigInt {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        let mut out = LinearTerm::constant(&self.constant * k);
        for (n, c) in &self.coeffs {
            out.add_var(n.clone(), c * k);
        }
        out
    }

    pub fn add(&self, other: &LinearTerm) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (n, c) in &other.coeffs {
            out.add_var(n.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LinearTerm) -> Self {
        self.add(&other.scaled(&-BigInt::one()))
    }

    /// Value under `lookup`; `None` when a variable has no value.
    pub fn eval(&self, mut lookup: impl FnMut(&str) -> Option<Rational>) -> Option<Rational> {
        let mut acc = Rational::from_integer(self.constant.clone());
        for (n, c) in &self.coeffs {
            acc += lookup(n)? * Rational::from_integer(c.clone());
        }
        Some(acc)
    }
}

/// `term ⋈ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicConstraint {
    pub term: LinearTerm,
    pub rel: Relation,
}

impl AtomicConstraint {
    pub fn new(term: LinearTerm, rel: Relation) -> Self {
        AtomicConstraint { term, rel }
    }

    /// `lhs ⋈ rhs`.
    pub fn compare(lhs: LinearTerm, rel: Relation, rhs: LinearTerm) -> Self {
        AtomicConstraint {
            term: lhs.sub(&rhs),
            rel,
        }
    }
}

/// Kind of a normalized constraint `expr ⋈ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    Eq,
    Le,
    Lt,
}

impl ConstraintKind {
    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintKind::Eq => "=",
            ConstraintKind::Le => "<=",
            ConstraintKind::Lt => "<",
        }
    }
}

/// Dense normalized constraint `Σ coeffs[i]·vᵢ + constant ⋈ 0`, ⋈ ∈ {=, ≤, <}.
///
/// Coefficients are integers with gcd 1 (together with the constant); an
/// equality has its leading nonzero coefficient positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub(crate) coeffs: Vec<BigInt>,
    pub(crate) constant: BigInt,
    pub(crate) kind: ConstraintKind,
}

impl Constraint {
    pub(crate) fn new(coeffs: Vec<BigInt>, constant: BigInt, kind: ConstraintKind) -> Self {
        let mut c = Constraint {
            coeffs,
            constant,
            kind,
        };
        c.normalize();
        c
    }

    /// Builds from rational coefficients, clearing denominators.
    pub(crate) fn from_rationals(coeffs: &[Rational], constant: &Rational, kind: ConstraintKind) -> Self {
        let mut l = constant.denom().clone();
        for c in coeffs {
            l = l.lcm(c.denom());
        }
        let scale = |q: &Rational| -> BigInt { q.numer() * (&l / q.denom()) };
        Constraint::new(coeffs.iter().map(scale).collect(), scale(constant), kind)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_trivial_vars(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// For a constraint with no variables: does it hold?
    pub(crate) fn constant_holds(&self) -> bool {
        match self.kind {
            ConstraintKind::Eq => self.constant.is_zero(),
            ConstraintKind::Le => !self.constant.is_positive(),
            ConstraintKind::Lt => self.constant.is_negative(),
        }
    }

    pub(crate) fn normalize(&mut self) {
        let mut g = self.constant.abs();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if self.is_trivial_vars() {
            // Keep constant-only constraints in a fixed shape.
            let s = self.constant.signum();
            self.constant = s;
            return;
        }
        if !g.is_zero() && !g.is_one() {
            for c in &mut self.coeffs {
                *c = &*c / &g;
            }
            self.constant = &self.constant / &g;
        }
        if self.kind == ConstraintKind::Eq {
            let lead = self.coeffs.iter().find(|c| !c.is_zero()).unwrap();
            if lead.is_negative() {
                for c in &mut self.coeffs {
                    *c = -&*c;
                }
                self.constant = -&self.constant;
            }
        }
    }

    /// Value of the left-hand side at `point`.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::from_integer(self.constant.clone());
        for (c, x) in self.coeffs.iter().zip(point) {
            if !c.is_zero() {
                acc += x * Rational::from_integer(c.clone());
            }
        }
        acc
    }

    /// Linear part only, applied to a direction.
    pub(crate) fn eval_direction(&self, d: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(d)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| x * Rational::from_integer(c.clone()))
            .sum()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        let v = self.eval(point);
        match self.kind {
            ConstraintKind::Eq => v.is_zero(),
            ConstraintKind::Le => !v.is_positive(),
            ConstraintKind::Lt => v.is_negative(),
        }
    }

    /// Complement pieces: one constraint for inequalities, two for equalities.
    pub(crate) fn negation(&self) -> Vec<Constraint> {
        let neg = |v: &[BigInt]| v.iter().map(|c| -c).collect::<Vec<_>>();
        match self.kind {
            ConstraintKind::Le => vec![Constraint::new(
                neg(&self.coeffs),
                -&self.constant,
                ConstraintKind::Lt,
            )],
            ConstraintKind::Lt => vec![Constraint::new(
                neg(&self.coeffs),
                -&self.constant,
                ConstraintKind::Le,
            )],
            ConstraintKind::Eq => vec![
                Constraint::new(self.coeffs.clone(), self.constant.clone(), ConstraintKind::Lt),
                Constraint::new(neg(&self.coeffs), -&self.constant, ConstraintKind::Lt),
            ],
        }
    }

    /// Splits an equality into two non-strict inequalities; other kinds are returned as is.
    pub(crate) fn as_inequalities(&self) -> Vec<Constraint> {
        match self.kind {
            ConstraintKind::Eq => vec![
                Constraint::new(self.coeffs.clone(), self.constant.clone(), ConstraintKind::Le),
                Constraint::new(
                    self.coeffs.iter().map(|c| -c).collect(),
                    -&self.constant,
                    ConstraintKind::Le,
                ),
            ],
            _ => vec![self.clone()],
        }
    }

    pub(crate) fn index_of_first_var(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    /// Converts back into a named atomic constraint over `space`.
    pub fn to_atomic(&self, space: &VarSpace) -> AtomicConstraint {
        let mut term = LinearTerm::constant(self.constant.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                term.add_var(space.name(i).to_string(), c.clone());
            }
        }
        let rel = match self.kind {
            ConstraintKind::Eq => Relation::Eq,
            ConstraintKind::Le => Relation::Le,
            ConstraintKind::Lt => Relation::Lt,
        };
        AtomicConstraint { term, rel }
    }

    /// Lowers an atomic constraint over named variables onto `space`.
    pub fn from_atomic(atom: &AtomicConstraint, space: &VarSpace) -> Result<Constraint, PolyError> {
        let mut coeffs = vec![BigInt::zero(); space.dim()];
        for (name, c) in atom.term.coeffs() {
            let i = space
                .index_of(name)
                .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
            coeffs[i] += c;
        }
        let constant = atom.term.constant_part().clone();
        let negate = |v: Vec<BigInt>, k: BigInt| (v.into_iter().map(|c| -c).collect(), -k);
        let (coeffs, constant, kind) = match atom.rel {
            Relation::Le => (coeffs, constant, ConstraintKind::Le),
            Relation::Lt => (coeffs, constant, ConstraintKind::Lt),
            Relation::Eq => (coeffs, constant, ConstraintKind::Eq),
            Relation::Ge => {
                let (c, k) = negate(coeffs, constant);
                (c, k, ConstraintKind::Le)
            }
            Relation::Gt => {
                let (c, k) = negate(coeffs, constant);
                (c, k, ConstraintKind::Lt)
            }
        };
        Ok(Constraint::new(coeffs, constant, kind))
    }

    /// Canonical sort key: leading variable, coefficients, relation, constant.
    pub(crate) fn sort_key(&self) -> (u8, usize, Vec<BigInt>, ConstraintKind, BigInt) {
        let eq_first = if self.kind == ConstraintKind::Eq { 0 } else { 1 };
        (
            eq_first,
            self.index_of_first_var(),
            self.coeffs.clone(),
            self.kind,
            self.constant.clone(),
        )
    }
}

/// Formats `Σ cᵢ·vᵢ + d` in declaration order, e.g. `x - 2*p + 1`.
pub(crate) fn format_expr(coeffs: &[BigInt], constant: &BigInt, name: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if !mag.is_one() {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(&name(i));
    }
    if out.is_empty() {
        return constant.to_string();
    }
    if constant.is_positive() {
        out.push_str(&format!(" + {constant}"));
    } else if constant.is_negative() {
        out.push_str(&format!(" - {}", constant.abs()));
    }
    out
}
