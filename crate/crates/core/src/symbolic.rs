//! Symbolic states over clocks and parameters, successor computation,
//! parametric extrapolation and the integer-hull keys used to cut exploration.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::model::{Edge, Pta};
use crate::poly::{Constraint, ConstraintKind, PolyError, PolyhedralSet, Polyhedron, VarSpace};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicState {
    pub location: usize,
    pub zone: Polyhedron,
}

/// Location plus the per-disjunct integer hull of the extrapolated zone.
#[derive(Clone, Debug)]
pub struct StateKey {
    pub location: usize,
    pub hull: PolyhedralSet,
    text: String,
    /// Membership of a fixed grid of integer points; equal sets agree on it.
    fingerprint: Option<Vec<u64>>,
}

/// Largest grid a fingerprint enumerates.
const FINGERPRINT_POINTS: usize = 1 << 14;

/// Bitset of the grid points lying in `set`, in lexicographic order.
fn fingerprint(set: &PolyhedralSet, ranges: &[(i64, i64)]) -> Option<Vec<u64>> {
    let mut total: usize = 1;
    for &(lo, hi) in ranges {
        total = total.checked_mul(usize::try_from(hi - lo + 1).ok()?)?;
    }
    if total > FINGERPRINT_POINTS {
        return None;
    }
    let rows: Vec<Vec<(Vec<i64>, i64, ConstraintKind)>> = set
        .disjuncts()
        .iter()
        .map(|d| {
            d.constraints()
                .iter()
                .map(|c| {
                    let coeffs = c.coeffs().iter().map(|a| a.to_i64()).collect::<Option<Vec<_>>>()?;
                    Some((coeffs, c.constant().to_i64()?, c.kind()))
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    let mut bits = vec![0u64; total.div_ceil(64)];
    let mut point: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    for i in 0..total {
        let inside = rows.iter().any(|cons| {
            cons.iter().all(|(a, b, kind)| {
                let v: i128 = a.iter().zip(&point).map(|(&a, &x)| a as i128 * x as i128).sum::<i128>() + *b as i128;
                match kind {
                    ConstraintKind::Eq => v == 0,
                    ConstraintKind::Le => v <= 0,
                    ConstraintKind::Lt => v < 0,
                }
            })
        });
        if inside {
            bits[i / 64] |= 1 << (i % 64);
        }
        for (x, &(lo, hi)) in point.iter_mut().zip(ranges).rev() {
            if *x < hi {
                *x += 1;
                break;
            }
            *x = lo;
        }
    }
    Some(bits)
}

impl StateKey {
    pub fn new(location: usize, hull: PolyhedralSet) -> Self {
        let text = hull.to_text();
        StateKey {
            location,
            hull,
            text,
            fingerprint: None,
        }
    }

    /// Also records which points of the box `ranges` (one per dimension) the hull holds.
    pub fn with_grid(location: usize, hull: PolyhedralSet, ranges: &[(i64, i64)]) -> Self {
        let fingerprint = fingerprint(&hull, ranges);
        StateKey {
            fingerprint,
            ..StateKey::new(location, hull)
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Same location and semantically equal hulls.
    pub fn matches(&self, other: &StateKey) -> bool {
        if self.location != other.location {
            return false;
        }
        if self.text == other.text {
            return true;
        }
        // Minimized closed polyhedra print canonically.
        let single_closed = |h: &PolyhedralSet| h.len() <= 1 && h.disjuncts().iter().all(|d| d.is_closed());
        if single_closed(&self.hull) && single_closed(&other.hull) {
            return false;
        }
        if let (Some(a), Some(b)) = (&self.fingerprint, &other.fingerprint) {
            if a != b {
                return false;
            }
        }
        self.hull.set_equals(&other.hull).unwrap_or(false)
    }
}

/// Which split of the clock range the extrapolation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `x ≤ M` and `x ≥ M`; the two pieces overlap on `x = M`.
    Closed,
    /// `x ≤ M` and `x > M`.
    Strict,
}

fn clock_vs_constant(dim: usize, clock: usize, upper: bool, m: i64, kind: ConstraintKind) -> Constraint {
    let mut v = vec![BigInt::zero(); dim];
    if upper {
        v[clock] = BigInt::one();
        Constraint::new(v, BigInt::from(-m), kind)
    } else {
        v[clock] = -BigInt::one();
        Constraint::new(v, BigInt::from(m), kind)
    }
}

/// Single-clock extrapolation of one polyhedron.
pub fn extrapolate_clock(c: &Polyhedron, clock: usize, m: i64, boundary: Boundary) -> Result<PolyhedralSet, PolyError> {
    if !c.space().is_clock(clock) {
        return Err(PolyError::NotAClock(format!("#{clock}")));
    }
    let dim = c.dim();
    let below = c.with_constraints([clock_vs_constant(dim, clock, true, m, ConstraintKind::Le)]);
    let above_kind = match boundary {
        Boundary::Closed => ConstraintKind::Le,
        Boundary::Strict => ConstraintKind::Lt,
    };
    let above_con = clock_vs_constant(dim, clock, false, m, above_kind);
    let above = c.with_constraints([above_con.clone()]);
    let lifted = if above.is_empty() {
        above
    } else {
        above.cylindrify(clock)?.with_constraints([above_con])
    };
    PolyhedralSet::from_disjuncts(c.space(), [below, lifted])
}

/// Extrapolation of every clock, in declaration order, applied disjunct-wise.
pub fn extrapolate(c: &Polyhedron, m: i64, boundary: Boundary) -> PolyhedralSet {
    let mut cur: PolyhedralSet = c.clone().into();
    for clock in 0..c.space().num_clocks() {
        let mut next = PolyhedralSet::empty(c.space());
        for d in cur.disjuncts() {
            let e = extrapolate_clock(d, clock, m, boundary).expect("clock index in range");
            next = next.union(&e).expect("same space");
        }
        cur = next;
    }
    cur
}

/// Symbolic semantics of one automaton with a fixed extrapolation constant.
pub struct Semantics<'a> {
    pta: &'a Pta,
    space: VarSpace,
    m: i64,
    param_box: Polyhedron,
    invariants: Vec<Polyhedron>,
    guards: Vec<Polyhedron>,
}

impl<'a> Semantics<'a> {
    pub fn new(pta: &'a Pta) -> Self {
        Self::with_constant(pta, pta.max_constant())
    }

    pub fn with_constant(pta: &'a Pta, m: i64) -> Self {
        let space = pta.space();
        let invariants = (0..pta.locations.len()).map(|l| pta.invariant(&space, l)).collect();
        let guards = pta.edges.iter().map(|e| pta.guard(&space, e)).collect();
        Semantics {
            pta,
            param_box: pta.param_box(&space),
            space,
            m,
            invariants,
            guards,
        }
    }

    pub fn pta(&self) -> &'a Pta {
        self.pta
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn max_constant(&self) -> i64 {
        self.m
    }

    pub fn param_box(&self) -> &Polyhedron {
        &self.param_box
    }

    pub fn invariant(&self, loc: usize) -> &Polyhedron {
        &self.invariants[loc]
    }

    pub fn guard(&self, edge: usize) -> &Polyhedron {
        &self.guards[edge]
    }

    /// `({clocks = 0} ∩ box ∩ I(ℓ₀))↗ ∩ I(ℓ₀)`; `None` when empty.
    pub fn initial_state(&self) -> Option<SymbolicState> {
        let l0 = self.pta.initial;
        let dim = self.space.dim();
        let zero = (0..self.space.num_clocks()).map(|i| {
            let mut v = vec![BigInt::zero(); dim];
            v[i] = BigInt::one();
            Constraint::new(v, BigInt::zero(), ConstraintKind::Eq)
        });
        let inv = &self.invariants[l0];
        let start = self.param_box.intersect(inv).expect("same space").with_constraints(zero);
        let zone = start.time_elapse_within(inv);
        (!zone.is_empty()).then_some(SymbolicState { location: l0, zone })
    }

    /// `((C ∩ g)_R ∩ I′)↗ ∩ I′`; `None` when empty.
    pub fn successor(&self, s: &SymbolicState, edge: usize) -> Result<Option<SymbolicState>, PolyError> {
        let e: &Edge = &self.pta.edges[edge];
        if e.source != s.location {
            return Err(PolyError::Unsupported(format!(
                "edge {} does not leave location `{}`",
                edge, self.pta.locations[s.location]
            )));
        }
        let inv = &self.invariants[e.target];
        let z = s.zone.guarded_reset(&self.guards[edge], &e.resets, inv);
        if z.is_empty() {
            return Ok(None);
        }
        let z = z.time_elapse_within(inv);
        Ok((!z.is_empty()).then_some(SymbolicState {
            location: e.target,
            zone: z,
        }))
    }

    pub fn extrapolate(&self, c: &Polyhedron) -> PolyhedralSet {
        extrapolate(c, self.m, Boundary::Closed)
    }

    pub fn hull_key(&self, s: &SymbolicState) -> Result<StateKey, PolyError> {
        let hull = self.extrapolate(&s.zone).nnc_integer_hull()?;
        let clocks = (0..self.space.num_clocks()).map(|_| (0, self.m + 1));
        let params = self.pta.bounds.iter().map(|b| (b.lower, b.upper));
        let ranges: Vec<_> = clocks.chain(params).collect();
        Ok(StateKey::with_grid(s.location, hull, &ranges))
    }

    /// `v ∈ C↓P`.
    pub fn is_v_compatible(&self, s: &SymbolicState, v: &[Rational]) -> Result<bool, PolyError> {
        s.zone.project_to_params().contains(v)
    }
}
