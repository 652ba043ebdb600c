use std::fmt;

use super::linear::{Constraint, VarSpace};
use super::lp;
use super::polyhedron::Polyhedron;
use super::PolyError;
use crate::Rational;

/// Finite union of polyhedra over one space.
///
/// Disjuncts are non-empty, none is included in another, and they are kept
/// sorted by canonical text so that printing is deterministic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyhedralSet {
    space: VarSpace,
    disjuncts: Vec<Polyhedron>,
}

impl fmt::Debug for PolyhedralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyhedralSet({})", self.to_text())
    }
}

impl fmt::Display for PolyhedralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<Polyhedron> for PolyhedralSet {
    fn from(p: Polyhedron) -> Self {
        let space = p.space().clone();
        let disjuncts = if p.is_empty() { Vec::new() } else { vec![p] };
        PolyhedralSet { space, disjuncts }
    }
}

impl PolyhedralSet {
    pub fn empty(space: &VarSpace) -> Self {
        PolyhedralSet {
            space: space.clone(),
            disjuncts: Vec::new(),
        }
    }

    pub fn universe(space: &VarSpace) -> Self {
        Polyhedron::universe(space).into()
    }

    /// Builds a reduced set; every disjunct must live in `space`.
    pub fn from_disjuncts(space: &VarSpace, disjuncts: impl IntoIterator<Item = Polyhedron>) -> Result<Self, PolyError> {
        let ds: Vec<Polyhedron> = disjuncts.into_iter().collect();
        if ds.iter().any(|d| !d.space().same(space)) {
            return Err(PolyError::SpaceMismatch);
        }
        Ok(Self::reduced(space, ds))
    }

    /// Parses `conj | conj | ...`; `false` is the empty set.
    pub fn parse(space: &VarSpace, text: &str) -> Result<Self, PolyError> {
        let disj = super::text::parse_disjunction(text)?;
        let ps = disj
            .iter()
            .map(|atoms| Polyhedron::new(space, atoms))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::reduced(space, ps))
    }

    fn reduced(space: &VarSpace, ds: Vec<Polyhedron>) -> Self {
        let mut ds: Vec<Polyhedron> = ds.into_iter().filter(|d| !d.is_empty()).collect();
        ds.sort_by_cached_key(|d| d.to_text());
        ds.dedup();
        let mut keep = vec![true; ds.len()];
        for i in 0..ds.len() {
            if !keep[i] {
                continue;
            }
            for j in 0..ds.len() {
                if i != j && keep[j] && ds[i].includes_unchecked(&ds[j]) {
                    keep[j] = false;
                }
            }
        }
        let disjuncts = ds.into_iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| d).collect();
        PolyhedralSet {
            space: space.clone(),
            disjuncts,
        }
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn disjuncts(&self) -> &[Polyhedron] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    fn check(&self, other: &PolyhedralSet) -> Result<(), PolyError> {
        if self.space.same(&other.space) {
            Ok(())
        } else {
            Err(PolyError::SpaceMismatch)
        }
    }

    pub fn contains(&self, point: &[Rational]) -> Result<bool, PolyError> {
        if point.len() != self.space.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.space.dim(),
                got: point.len(),
            });
        }
        for d in &self.disjuncts {
            if d.contains(point)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn union(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyError> {
        self.check(other)?;
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let ds = self.disjuncts.iter().chain(&other.disjuncts).cloned().collect();
        Ok(Self::reduced(&self.space, ds))
    }

    pub fn intersection(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyError> {
        self.check(other)?;
        let mut ds = Vec::with_capacity(self.len() * other.len());
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                ds.push(a.intersect_unchecked(b));
            }
        }
        Ok(Self::reduced(&self.space, ds))
    }

    pub fn intersect_polyhedron(&self, p: &Polyhedron) -> Result<PolyhedralSet, PolyError> {
        self.intersection(&p.clone().into())
    }

    pub fn difference(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyError> {
        self.check(other)?;
        let mut cur = self.disjuncts.clone();
        for c in &other.disjuncts {
            if cur.is_empty() {
                break;
            }
            let mut next = Vec::new();
            for p in &cur {
                next.extend(subtract_convex(p, c));
            }
            cur = next;
        }
        Ok(Self::reduced(&self.space, cur))
    }

    /// `domain \ self`.
    pub fn complement(&self, domain: &PolyhedralSet) -> Result<PolyhedralSet, PolyError> {
        domain.difference(self)
    }

    pub fn includes(&self, other: &PolyhedralSet) -> Result<bool, PolyError> {
        self.check(other)?;
        if other.is_empty() {
            return Ok(true);
        }
        for d in &other.disjuncts {
            if self.disjuncts.iter().any(|s| s.includes_unchecked(d)) {
                continue;
            }
            let rest = PolyhedralSet::from(d.clone()).difference(self)?;
            if !rest.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Semantic equality via mutual difference emptiness.
    pub fn set_equals(&self, other: &PolyhedralSet) -> Result<bool, PolyError> {
        self.check(other)?;
        if self == other {
            return Ok(true);
        }
        Ok(self.includes(other)? && other.includes(self)?)
    }

    /// Per-disjunct parameter projection; the result lives in the parameter-only space.
    pub fn project_to_params(&self) -> PolyhedralSet {
        let ps = self.space.params_only();
        let ds = self.disjuncts.iter().map(|d| d.project_to_params()).collect();
        Self::reduced(&ps, ds)
    }

    /// Integer hull of each disjunct.
    pub fn integer_hull(&self) -> Result<PolyhedralSet, PolyError> {
        let ds = self
            .disjuncts
            .iter()
            .map(|d| d.integer_hull())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::reduced(&self.space, ds))
    }

    /// `nnc_integer_hull` of each disjunct.
    pub fn nnc_integer_hull(&self) -> Result<PolyhedralSet, PolyError> {
        let ds = self
            .disjuncts
            .iter()
            .map(|d| d.nnc_integer_hull())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::reduced(&self.space, ds))
    }

    /// Replaces pairs of disjuncts by their envelope whenever the envelope is
    /// exactly their union. The point set is unchanged.
    pub fn coalesce(&self) -> PolyhedralSet {
        let mut ds = self.disjuncts.clone();
        'outer: loop {
            for i in 0..ds.len() {
                for j in i + 1..ds.len() {
                    if let Some(e) = envelope_if_exact(&ds[i], &ds[j]) {
                        ds.remove(j);
                        ds[i] = e;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        Self::reduced(&self.space, ds)
    }

    pub fn to_text(&self) -> String {
        if self.disjuncts.is_empty() {
            return "false".into();
        }
        self.disjuncts.iter().map(|d| d.to_text()).collect::<Vec<_>>().join(" | ")
    }
}

/// `p \ c` as disjoint pieces `p ∩ c_1 ∩ … ∩ c_{i-1} ∩ ¬c_i`.
fn subtract_convex(p: &Polyhedron, c: &Polyhedron) -> Vec<Polyhedron> {
    if c.is_empty() {
        return vec![p.clone()];
    }
    if c.includes_unchecked(p) {
        return Vec::new();
    }
    let inter = p.intersect_unchecked(c);
    if inter.is_empty() {
        return vec![p.clone()];
    }
    let mut out = Vec::new();
    let mut acc = p.clone();
    for con in c.constraints() {
        if acc.is_empty() {
            break;
        }
        if holds_on(&acc, con) {
            continue;
        }
        for n in con.negation() {
            let piece = acc.with_constraints([n]);
            if !piece.is_empty() {
                out.push(piece);
            }
        }
        acc = acc.with_constraints([con.clone()]);
    }
    out
}

/// Is every point of `p` inside the constraint's half-space?
fn holds_on(p: &Polyhedron, c: &Constraint) -> bool {
    if p.is_empty() || p.constraints().contains(c) {
        return true;
    }
    c.negation().iter().all(|n| {
        let mut rows: Vec<&Constraint> = p.constraints().iter().collect();
        rows.push(n);
        !lp::feasible(p.dim(), &rows)
    })
}

fn envelope_if_exact(a: &Polyhedron, b: &Polyhedron) -> Option<Polyhedron> {
    let mut cons = Vec::new();
    for c in a.constraints() {
        for h in c.as_inequalities() {
            if holds_on(b, &h) {
                cons.push(h);
            }
        }
    }
    for c in b.constraints() {
        for h in c.as_inequalities() {
            if holds_on(a, &h) {
                cons.push(h);
            }
        }
    }
    let env = Polyhedron::from_constraints(a.space(), cons);
    let mut rest = vec![env.clone()];
    for d in [a, b] {
        rest = rest.iter().flat_map(|r| subtract_convex(r, d)).collect();
    }
    if rest.is_empty() {
        Some(env)
    } else {
        None
    }
}
