use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dd::{cone_generators, primitive};
use super::linear::{format_expr, AtomicConstraint, Constraint, ConstraintKind, VarSpace};
use super::lp;
use super::PolyError;
use crate::Rational;

/// Generators of a polyhedron's topological closure.
///
/// `points` are vertices that belong to the polyhedron itself (plus one
/// relative-interior point when no vertex does); `closure_points` are vertices
/// of the closure excluded by a strict constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub points: Vec<Vec<Rational>>,
    pub closure_points: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<BigInt>>,
    pub lines: Vec<Vec<BigInt>>,
}

/// Convex polyhedron over a [`VarSpace`], possibly with strict constraints.
#[derive(Clone)]
pub struct Polyhedron {
    space: VarSpace,
    cons: Vec<Constraint>,
    empty: bool,
    gens: OnceLock<Generators>,
}

impl PartialEq for Polyhedron {
    /// Structural equality of the canonical forms.
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.empty == other.empty && self.cons == other.cons
    }
}

impl Eq for Polyhedron {}

impl std::hash::Hash for Polyhedron {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.empty.hash(state);
        self.cons.hash(state);
    }
}

impl fmt::Debug for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polyhedron({})", self.to_text())
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Polyhedron {
    pub fn universe(space: &VarSpace) -> Self {
        Polyhedron {
            space: space.clone(),
            cons: Vec::new(),
            empty: false,
            gens: OnceLock::new(),
        }
    }

    pub fn empty(space: &VarSpace) -> Self {
        Polyhedron {
            space: space.clone(),
            cons: Vec::new(),
            empty: true,
            gens: OnceLock::new(),
        }
    }

    /// Solution set of a conjunction of atomic constraints.
    pub fn new(space: &VarSpace, atoms: &[AtomicConstraint]) -> Result<Self, PolyError> {
        let cons = atoms
            .iter()
            .map(|a| Constraint::from_atomic(a, space))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_constraints(space, cons))
    }

    /// Parses the canonical text form, e.g. `x - 2*p <= 0 & 1 <= 2*p`.
    pub fn parse(space: &VarSpace, text: &str) -> Result<Self, PolyError> {
        let atoms = super::text::parse_conjunction(text)?;
        Self::new(space, &atoms)
    }

    /// Minimizes an arbitrary constraint system over `space`.
    pub fn from_constraints(space: &VarSpace, cons: Vec<Constraint>) -> Self {
        debug_assert!(cons.iter().all(|c| c.dim() == space.dim()));
        match minimize(space.dim(), cons) {
            Some(cons) => Polyhedron {
                space: space.clone(),
                cons,
                empty: false,
                gens: OnceLock::new(),
            },
            None => Self::empty(space),
        }
    }

    /// Closed polyhedron `conv(points) + cone(rays) + span(lines)`.
    pub fn from_generators(
        space: &VarSpace,
        points: &[Vec<Rational>],
        rays: &[Vec<BigInt>],
        lines: &[Vec<BigInt>],
    ) -> Result<Self, PolyError> {
        let dim = space.dim();
        for v in points {
            if v.len() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        for v in rays.iter().chain(lines) {
            if v.len() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        if points.is_empty() {
            return Ok(Self::empty(space));
        }
        // Dual cone: (a, b) with a·g + b·t >= 0 for every homogenized generator.
        let mut dual_ineqs = Vec::with_capacity(points.len() + rays.len());
        for p in points {
            let mut l = BigInt::one();
            for q in p {
                l = l.lcm(q.denom());
            }
            let mut h: Vec<BigInt> = p.iter().map(|q| q.numer() * (&l / q.denom())).collect();
            h.push(l);
            dual_ineqs.push(h);
        }
        for r in rays {
            let mut h = r.clone();
            h.push(BigInt::zero());
            dual_ineqs.push(h);
        }
        let dual_eqs: Vec<Vec<BigInt>> = lines
            .iter()
            .map(|l| {
                let mut h = l.clone();
                h.push(BigInt::zero());
                h
            })
            .collect();
        let g = cone_generators(dim + 1, &dual_eqs, &dual_ineqs);
        let mut cons = Vec::new();
        // a·x + b >= 0  becomes  -a·x - b <= 0.
        for l in &g.lines {
            cons.push(Constraint::new(l[..dim].to_vec(), l[dim].clone(), ConstraintKind::Eq));
        }
        for r in &g.rays {
            if r[..dim].iter().all(Zero::is_zero) {
                continue;
            }
            cons.push(Constraint::new(
                r[..dim].iter().map(|c| -c).collect(),
                -&r[dim],
                ConstraintKind::Le,
            ));
        }
        Ok(Self::from_constraints(space, cons))
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn atomic_constraints(&self) -> Vec<AtomicConstraint> {
        self.cons.iter().map(|c| c.to_atomic(&self.space)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn is_universe(&self) -> bool {
        !self.empty && self.cons.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.cons.iter().all(|c| c.kind != ConstraintKind::Lt)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn check_space(&self, other: &Polyhedron) -> Result<(), PolyError> {
        if self.space.same(&other.space) {
            Ok(())
        } else {
            Err(PolyError::SpaceMismatch)
        }
    }

    /// Membership of a full valuation (clocks then parameters).
    pub fn contains(&self, point: &[Rational]) -> Result<bool, PolyError> {
        if point.len() != self.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(!self.empty && self.cons.iter().all(|c| c.satisfied_by(point)))
    }

    /// Does `self` include every point of `other`?
    pub fn includes(&self, other: &Polyhedron) -> Result<bool, PolyError> {
        self.check_space(other)?;
        Ok(self.includes_unchecked(other))
    }

    pub(crate) fn includes_unchecked(&self, other: &Polyhedron) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        if self.cons == other.cons {
            return true;
        }
        let dim = self.dim();
        self.cons.iter().all(|c| {
            if other.cons.contains(c) {
                return true;
            }
            c.negation().iter().all(|n| {
                let mut rows: Vec<&Constraint> = other.cons.iter().collect();
                rows.push(n);
                !lp::feasible(dim, &rows)
            })
        })
    }

    /// Semantic equality (mutual inclusion).
    pub fn set_equals(&self, other: &Polyhedron) -> Result<bool, PolyError> {
        self.check_space(other)?;
        Ok(self.set_equals_unchecked(other))
    }

    pub(crate) fn set_equals_unchecked(&self, other: &Polyhedron) -> bool {
        self == other || (self.includes_unchecked(other) && other.includes_unchecked(self))
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron, PolyError> {
        self.check_space(other)?;
        Ok(self.intersect_unchecked(other))
    }

    pub(crate) fn intersect_unchecked(&self, other: &Polyhedron) -> Polyhedron {
        if self.empty || other.is_universe() {
            return self.clone();
        }
        if other.empty || self.is_universe() {
            return other.clone();
        }
        self.with_constraints(other.cons.iter().cloned())
    }

    /// `self ∩ {extra constraints}`.
    pub fn with_constraints(&self, extra: impl IntoIterator<Item = Constraint>) -> Polyhedron {
        if self.empty {
            return self.clone();
        }
        let mut cons = self.cons.clone();
        cons.extend(extra);
        Polyhedron::from_constraints(&self.space, cons)
    }

    /// Intersection with a conjunction of named atomic constraints.
    pub fn with_atoms(&self, atoms: &[AtomicConstraint]) -> Result<Polyhedron, PolyError> {
        let extra = atoms
            .iter()
            .map(|a| Constraint::from_atomic(a, &self.space))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.with_constraints(extra))
    }

    /// Future: every clock advances by the same non-negative delay.
    pub fn time_elapse(&self) -> Polyhedron {
        self.shift_along_clocks(true, None)
    }

    /// Past, restricted to non-negative clocks.
    pub fn time_past(&self) -> Polyhedron {
        let nonneg = (0..self.space.num_clocks())
            .map(|i| var_bound(self.dim(), i, false, 0))
            .collect();
        self.shift_along_clocks(false, Some(&Polyhedron::from_minimized(&self.space, nonneg)))
    }

    /// `{y | ∃d ≥ 0. y ∓ d·1_X ∈ self}`.
    fn shift_along_clocks(&self, forward: bool, bound: Option<&Polyhedron>) -> Polyhedron {
        if self.empty || self.space.num_clocks() == 0 {
            return match bound {
                Some(b) => self.intersect_unchecked(b),
                None => self.clone(),
            };
        }
        let dim = self.dim();
        let nclocks = self.space.num_clocks();
        let mut ext = Vec::with_capacity(self.cons.len() + 1);
        for c in &self.cons {
            let s: BigInt = c.coeffs[..nclocks].iter().sum();
            let mut coeffs = c.coeffs.clone();
            coeffs.push(if forward { -s } else { s });
            ext.push(Constraint::new(coeffs, c.constant.clone(), c.kind));
        }
        let mut d = vec![BigInt::zero(); dim + 1];
        d[dim] = -BigInt::one();
        ext.push(Constraint::new(d, BigInt::zero(), ConstraintKind::Le));
        let reduced = eliminate(dim + 1, ext, dim);
        let mut cons: Vec<Constraint> = reduced
            .into_iter()
            .map(|mut c| {
                c.coeffs.truncate(dim);
                c
            })
            .collect();
        if let Some(b) = bound {
            if b.empty {
                return Polyhedron::empty(&self.space);
            }
            cons.extend(b.cons.iter().cloned());
        }
        Polyhedron::from_constraints(&self.space, cons)
    }

    /// Existentially quantifies the given coordinates (they stay in the space, unconstrained).
    pub fn forget(&self, vars: &[usize]) -> Polyhedron {
        if self.empty || vars.is_empty() {
            return self.clone();
        }
        match eliminate_all(self.dim(), self.cons.clone(), vars) {
            Some(cons) => Polyhedron::from_minimized(&self.space, cons),
            None => Polyhedron::empty(&self.space),
        }
    }

    /// Resets the named clocks to zero.
    pub fn reset(&self, clocks: &[usize]) -> Result<Polyhedron, PolyError> {
        for &c in clocks {
            if !self.space.is_clock(c) {
                return Err(PolyError::NotAClock(self.space.name(c).to_string()));
            }
        }
        Ok(self.guarded_reset(&Polyhedron::universe(&self.space), clocks, &Polyhedron::universe(&self.space)))
    }

    /// `(self ∩ guard)` with `clocks` reset to zero, then intersected with `target`.
    /// Only the final system is minimized.
    pub fn guarded_reset(&self, guard: &Polyhedron, clocks: &[usize], target: &Polyhedron) -> Polyhedron {
        if self.empty || guard.empty || target.empty {
            return Polyhedron::empty(&self.space);
        }
        let dim = self.dim();
        let mut cons = self.cons.clone();
        cons.extend(guard.cons.iter().cloned());
        if !clocks.is_empty() {
            cons = match minimize(dim, cons) {
                Some(c) => c,
                None => return Polyhedron::empty(&self.space),
            };
            for &c in clocks {
                cons = eliminate(dim, cons, c);
            }
        }
        cons.extend(clocks.iter().map(|&c| {
            let mut v = vec![BigInt::zero(); dim];
            v[c] = BigInt::one();
            Constraint::new(v, BigInt::zero(), ConstraintKind::Eq)
        }));
        cons.extend(target.cons.iter().cloned());
        Polyhedron::from_constraints(&self.space, cons)
    }

    /// `self↗ ∩ bound`, minimized once.
    pub fn time_elapse_within(&self, bound: &Polyhedron) -> Polyhedron {
        self.shift_along_clocks(true, Some(bound))
    }

    /// Unconstrains `var`, keeping only `var ≥ 0`.
    pub fn cylindrify(&self, var: usize) -> Result<Polyhedron, PolyError> {
        if var >= self.dim() {
            return Err(PolyError::UnknownVariable(format!("#{var}")));
        }
        let p = self.forget(&[var]);
        Ok(p.with_constraints([var_bound(self.dim(), var, false, 0)]))
    }

    /// Projection onto the parameters; the result lives in the parameter-only space.
    pub fn project_to_params(&self) -> Polyhedron {
        let nclocks = self.space.num_clocks();
        let pspace = self.space.params_only();
        if self.empty {
            return Polyhedron::empty(&pspace);
        }
        let clocks: Vec<usize> = (0..nclocks).collect();
        let p = self.forget(&clocks);
        if p.empty {
            return Polyhedron::empty(&pspace);
        }
        // Dropping all-zero columns keeps the minimized form.
        let cons = p
            .cons
            .iter()
            .map(|c| Constraint::new(c.coeffs[nclocks..].to_vec(), c.constant.clone(), c.kind))
            .collect();
        Polyhedron::from_minimized(&pspace, cons)
    }

    /// Lifts a parameter-only polyhedron into `space` (clocks unconstrained).
    pub fn embed_params(&self, space: &VarSpace) -> Result<Polyhedron, PolyError> {
        if self.space.num_clocks() != 0 || self.space.params() != space.params() {
            return Err(PolyError::SpaceMismatch);
        }
        if self.empty {
            return Ok(Polyhedron::empty(space));
        }
        let nclocks = space.num_clocks();
        let cons = self
            .cons
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); nclocks];
                v.extend(c.coeffs.iter().cloned());
                Constraint::new(v, c.constant.clone(), c.kind)
            })
            .collect();
        Ok(Polyhedron::from_constraints(space, cons))
    }

    /// Instantiates every parameter, giving a polyhedron over the clocks only.
    pub fn substitute_params(&self, values: &[Rational]) -> Result<Polyhedron, PolyError> {
        let np = self.space.num_params();
        if values.len() != np {
            return Err(PolyError::DimensionMismatch { expected: np, got: values.len() });
        }
        let cspace = self.space.clocks_only();
        if self.empty {
            return Ok(Polyhedron::empty(&cspace));
        }
        let nclocks = self.space.num_clocks();
        let cons = self
            .cons
            .iter()
            .map(|c| {
                let mut k = Rational::from_integer(c.constant.clone());
                for (a, v) in c.coeffs[nclocks..].iter().zip(values) {
                    k += v * Rational::from_integer(a.clone());
                }
                let coeffs: Vec<Rational> = c.coeffs[..nclocks]
                    .iter()
                    .map(|a| Rational::from_integer(a.clone()))
                    .collect();
                Constraint::from_rationals(&coeffs, &k, c.kind)
            })
            .collect();
        Ok(Polyhedron::from_constraints(&cspace, cons))
    }

    /// Closed hull of the integer points, plus the recession cone.
    pub fn integer_hull(&self) -> Result<Polyhedron, PolyError> {
        super::hull::integer_hull(self)
    }

    /// `IH(cl P) ∩ P`: keeps the strict faces of `P` that the closed hull
    /// touches, so a zone with integer constants stays its own hull.
    pub fn nnc_integer_hull(&self) -> Result<Polyhedron, PolyError> {
        if self.is_closed() {
            return self.integer_hull();
        }
        let hull = self.closure().integer_hull()?;
        Ok(hull.intersect_unchecked(self))
    }

    /// Topological closure: strict inequalities relaxed.
    pub fn closure(&self) -> Polyhedron {
        if self.empty || self.is_closed() {
            return self.clone();
        }
        let cons = self
            .cons
            .iter()
            .map(|c| {
                let mut c = c.clone();
                if c.kind == ConstraintKind::Lt {
                    c.kind = ConstraintKind::Le;
                }
                c
            })
            .collect();
        Polyhedron::from_constraints(&self.space, cons)
    }

    /// Generators of the topological closure (cached).
    pub fn generators(&self) -> &Generators {
        self.gens.get_or_init(|| self.compute_generators())
    }

    fn compute_generators(&self) -> Generators {
        if self.empty {
            return Generators::default();
        }
        let dim = self.dim();
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for c in &self.cons {
            let mut h = c.coeffs.clone();
            h.push(c.constant.clone());
            match c.kind {
                ConstraintKind::Eq => eqs.push(h),
                _ => ineqs.push(h.into_iter().map(|x| -x).collect()),
            }
        }
        let mut t = vec![BigInt::zero(); dim + 1];
        t[dim] = BigInt::one();
        ineqs.push(t);
        let g = cone_generators(dim + 1, &eqs, &ineqs);
        let mut out = Generators {
            lines: g.lines.iter().map(|l| primitive(l[..dim].to_vec())).collect(),
            ..Generators::default()
        };
        for r in &g.rays {
            if r[dim].is_zero() {
                out.rays.push(primitive(r[..dim].to_vec()));
            } else {
                let t = &r[dim];
                let p: Vec<Rational> = r[..dim].iter().map(|x| Rational::new(x.clone(), t.clone())).collect();
                if self.cons.iter().all(|c| c.satisfied_by(&p)) {
                    out.points.push(p);
                } else {
                    out.closure_points.push(p);
                }
            }
        }
        if out.points.is_empty() {
            // Barycenter of the vertices pushed along every ray is relatively interior.
            let n = Rational::from_integer(BigInt::from(out.closure_points.len()));
            let mut p = vec![Rational::zero(); dim];
            for q in &out.closure_points {
                for (a, b) in p.iter_mut().zip(q) {
                    *a += b;
                }
            }
            for a in p.iter_mut() {
                *a /= &n;
            }
            for r in &out.rays {
                for (a, b) in p.iter_mut().zip(r) {
                    *a += Rational::from_integer(b.clone());
                }
            }
            debug_assert!(self.cons.iter().all(|c| c.satisfied_by(&p)));
            out.points.push(p);
        }
        sort_points(&mut out.points);
        sort_points(&mut out.closure_points);
        out.rays.sort();
        out.lines.sort();
        out
    }

    /// Canonical text, e.g. `x - 2*p <= 0 & -2*p + 1 <= 0`; `true`/`false` for universe/empty.
    pub fn to_text(&self) -> String {
        if self.empty {
            return "false".into();
        }
        if self.cons.is_empty() {
            return "true".into();
        }
        self.cons
            .iter()
            .map(|c| constraint_text(c, &self.space))
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Wraps constraints that are already minimized.
    fn from_minimized(space: &VarSpace, cons: Vec<Constraint>) -> Polyhedron {
        Polyhedron {
            space: space.clone(),
            cons,
            empty: false,
            gens: OnceLock::new(),
        }
    }
}

pub(crate) fn constraint_text(c: &Constraint, space: &VarSpace) -> String {
    format!(
        "{} {} 0",
        format_expr(&c.coeffs, &c.constant, |i| space.name(i).to_string()),
        c.kind.symbol()
    )
}

fn sort_points(v: &mut [Vec<Rational>]) {
    v.sort();
}

/// `x_var ≤ k` (upper) or `x_var ≥ k` (lower).
pub(crate) fn var_bound(dim: usize, var: usize, upper: bool, k: i64) -> Constraint {
    let mut v = vec![BigInt::zero(); dim];
    if upper {
        v[var] = BigInt::one();
        Constraint::new(v, BigInt::from(-k), ConstraintKind::Le)
    } else {
        v[var] = -BigInt::one();
        Constraint::new(v, BigInt::from(k), ConstraintKind::Le)
    }
}

/// Eliminates `vars` one by one, minimizing between steps; `None` when empty.
fn eliminate_all(dim: usize, mut cons: Vec<Constraint>, vars: &[usize]) -> Option<Vec<Constraint>> {
    for &v in vars {
        cons = minimize(dim, eliminate(dim, cons, v))?;
    }
    Some(cons)
}

/// Fourier–Motzkin elimination of coordinate `var` (the column is kept, zeroed).
pub(crate) fn eliminate(dim: usize, cons: Vec<Constraint>, var: usize) -> Vec<Constraint> {
    let _ = dim;
    if let Some(ei) = cons
        .iter()
        .position(|c| c.kind == ConstraintKind::Eq && !c.coeffs[var].is_zero())
    {
        let eq = cons[ei].clone();
        let ev = eq.coeffs[var].clone();
        let mult = ev.abs();
        let sign = ev.signum();
        return cons
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != ei)
            .map(|(_, c)| {
                if c.coeffs[var].is_zero() {
                    return c;
                }
                let f = &sign * &c.coeffs[var];
                let coeffs = c.coeffs.iter().zip(&eq.coeffs).map(|(a, e)| &mult * a - &f * e).collect();
                let constant = &mult * &c.constant - &f * &eq.constant;
                Constraint::new(coeffs, constant, c.kind)
            })
            .collect();
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for c in cons {
        if c.coeffs[var].is_positive() {
            pos.push(c);
        } else if c.coeffs[var].is_negative() {
            neg.push(c);
        } else {
            out.push(c);
        }
    }
    for p in &pos {
        for n in &neg {
            let a = &p.coeffs[var];
            let b = -&n.coeffs[var];
            let coeffs = p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| &b * x + a * y).collect();
            let constant = &b * &p.constant + a * &n.constant;
            let kind = if p.kind == ConstraintKind::Lt || n.kind == ConstraintKind::Lt {
                ConstraintKind::Lt
            } else {
                ConstraintKind::Le
            };
            out.push(Constraint::new(coeffs, constant, kind));
        }
    }
    out
}

/// Canonical minimized form, or `None` when the system is empty.
pub(crate) fn minimize(dim: usize, cons: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut rows = Vec::with_capacity(cons.len());
    for c in cons {
        if c.is_trivial_vars() {
            if !c.constant_holds() {
                return None;
            }
        } else if !rows.contains(&c) {
            rows.push(c);
        }
    }
    if rows.is_empty() {
        return Some(rows);
    }

    // Emptiness and implicit equalities in one pass when possible.
    let refs: Vec<&Constraint> = rows.iter().collect();
    let (slack_all, interior) = lp::slack_point(dim, &refs, |_| true)?;
    if !slack_all.is_positive() {
        if rows.iter().any(|c| c.kind == ConstraintKind::Lt) && !lp::feasible(dim, &refs) {
            return None;
        }
        let mut promoted = Vec::new();
        for (i, c) in rows.iter().enumerate() {
            if c.kind != ConstraintKind::Le {
                continue;
            }
            let strict = Constraint {
                kind: ConstraintKind::Lt,
                ..c.clone()
            };
            let mut test: Vec<&Constraint> = rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
            test.push(&strict);
            if !lp::feasible(dim, &test) {
                promoted.push(i);
            }
        }
        for i in promoted {
            rows[i].kind = ConstraintKind::Eq;
            rows[i].normalize();
        }
    }

    // Equalities in reduced echelon form over the declaration order.
    let (eqs, mut ineqs): (Vec<Constraint>, Vec<Constraint>) =
        rows.into_iter().partition(|c| c.kind == ConstraintKind::Eq);
    let eqs = echelon(dim, eqs);
    for ineq in ineqs.iter_mut() {
        for (pivot, e) in &eqs {
            let a = ineq.coeffs[*pivot].clone();
            if a.is_zero() {
                continue;
            }
            let ep = e.coeffs[*pivot].clone();
            let coeffs = ineq.coeffs.iter().zip(&e.coeffs).map(|(x, y)| &ep * x - &a * y).collect();
            let constant = &ep * &ineq.constant - &a * &e.constant;
            *ineq = Constraint::new(coeffs, constant, ineq.kind);
        }
    }
    let mut kept: Vec<Constraint> = Vec::new();
    for c in ineqs {
        if c.is_trivial_vars() {
            if !c.constant_holds() {
                return None;
            }
            continue;
        }
        // Parallel constraints: keep the tightest.
        if let Some(other) = kept.iter_mut().find(|k| k.coeffs == c.coeffs) {
            let tighter = c.constant > other.constant
                || (c.constant == other.constant && c.kind == ConstraintKind::Lt);
            if tighter {
                *other = c;
            }
            continue;
        }
        kept.push(c);
    }
    kept.sort_by_key(|c| c.sort_key());

    // Redundancy elimination; constraints with a cheap witness skip the LP.
    let certified: Vec<bool> = if slack_all.is_positive() {
        (0..kept.len()).map(|i| has_witness(&kept, i, &eqs, &interior)).collect()
    } else {
        vec![false; kept.len()]
    };
    let eq_list: Vec<Constraint> = eqs.into_iter().map(|(_, e)| e).collect();
    let mut certified = certified.into_iter();
    let mut i = 0;
    while i < kept.len() {
        if certified.next() == Some(true) {
            i += 1;
            continue;
        }
        let redundant = kept[i].negation().iter().all(|n| {
            let mut test: Vec<&Constraint> = eq_list.iter().collect();
            test.extend(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c));
            test.push(n);
            !lp::feasible(dim, &test)
        });
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }

    let mut out = eq_list;
    out.extend(kept);
    out.sort_by_key(|c| c.sort_key());
    Some(out)
}

/// Looks for a point that violates `kept[i]` and satisfies every other
/// constraint, by stepping from an interior point along the normal of
/// `kept[i]` projected onto the equality subspace.
fn has_witness(kept: &[Constraint], i: usize, eqs: &[(usize, Constraint)], interior: &[Rational]) -> bool {
    let c = &kept[i];
    let mut d: Vec<Rational> = c.coeffs.iter().map(|a| Rational::from_integer(a.clone())).collect();
    for (pivot, e) in eqs {
        // Inequalities are reduced, so pivot columns of `d` start at zero.
        let ep = Rational::from_integer(e.coeffs[*pivot].clone());
        let s: Rational = e
            .coeffs
            .iter()
            .zip(&d)
            .enumerate()
            .filter(|(j, _)| j != pivot)
            .map(|(_, (a, x))| Rational::from_integer(a.clone()) * x)
            .sum();
        d[*pivot] = -s / ep;
    }
    let slack = -c.eval(interior);
    let rate = c.eval_direction(&d);
    if !slack.is_positive() || !rate.is_positive() {
        return false;
    }
    let t = slack * Rational::new(1025.into(), 1024.into()) / rate;
    let y: Vec<Rational> = interior.iter().zip(&d).map(|(x, dx)| x + &t * dx).collect();
    kept.iter().enumerate().all(|(j, o)| j == i || o.satisfied_by(&y))
}

/// Reduced row echelon form of linearly independent equalities, each row
/// primitive with a positive pivot. Returns `(pivot column, row)` pairs.
fn echelon(dim: usize, eqs: Vec<Constraint>) -> Vec<(usize, Constraint)> {
    let mut rows: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|c| {
            let mut r: Vec<Rational> = c.coeffs.iter().map(|a| Rational::from_integer(a.clone())).collect();
            r.push(Rational::from_integer(c.constant.clone()));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pr = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, q) in row.iter_mut().zip(&pr) {
                    *v -= &f * q;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
        .into_iter()
        .zip(rows)
        .map(|(p, row)| {
            let c = Constraint::from_rationals(&row[..dim], &row[dim], ConstraintKind::Eq);
            (p, c)
        })
        .collect()
}
