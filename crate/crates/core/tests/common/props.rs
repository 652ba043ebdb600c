//! Randomized checks shared by the property tests and the acceptance suite.

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyparam::poly::{AtomicConstraint, LinearTerm, PolyhedralSet, Polyhedron, Relation, VarSpace};
use polyparam::symbolic::{extrapolate, extrapolate_clock, Boundary, Semantics, SymbolicState};
use polyparam::Rational;

use super::random_pta;

type Check = Result<(), TestCaseError>;

const CLOCKS: [&str; 2] = ["x", "y"];
const PARAMS: [&str; 2] = ["p", "q"];
/// Parameters range over `[0, PARAM_MAX]`.
const PARAM_MAX: i64 = 3;
/// Bounded inputs keep clocks within `[0, CLOCK_MAX]`.
const CLOCK_MAX: i64 = 5;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn space(clocks: usize, params: usize) -> VarSpace {
    VarSpace::new(CLOCKS[..clocks].to_vec(), PARAMS[..params].to_vec()).unwrap()
}

/// `Σ coeffs·vars + constant ⋈ 0` over `space`.
#[derive(Clone, Debug)]
pub struct RawConstraint {
    coeffs: Vec<i64>,
    constant: i64,
    rel: Relation,
}

impl RawConstraint {
    fn atom(&self, space: &VarSpace) -> AtomicConstraint {
        let mut t = LinearTerm::constant(self.constant);
        for (i, &c) in self.coeffs.iter().enumerate().take(space.dim()) {
            if c != 0 {
                t = t.plus_var(space.name(i), c);
            }
        }
        AtomicConstraint::new(t, self.rel)
    }
}

pub fn raw_constraint() -> impl Strategy<Value = RawConstraint> {
    let rel = prop_oneof![
        3 => Just(Relation::Le),
        2 => Just(Relation::Lt),
        2 => Just(Relation::Ge),
        1 => Just(Relation::Gt),
        1 => Just(Relation::Eq),
    ];
    (prop::collection::vec(-2i64..=2, 4), -6i64..=6, rel).prop_map(|(coeffs, constant, rel)| RawConstraint {
        coeffs,
        constant,
        rel,
    })
}

fn var_bound(name: &str, rel: Relation, k: i64) -> AtomicConstraint {
    AtomicConstraint::new(LinearTerm::var(name).plus_const(-k), rel)
}

/// Clocks non-negative, parameters in the box, optionally clocks bounded.
fn frame(space: &VarSpace, bounded: bool) -> Vec<AtomicConstraint> {
    let mut atoms = Vec::new();
    for x in space.clocks() {
        atoms.push(var_bound(x, Relation::Ge, 0));
        if bounded {
            atoms.push(var_bound(x, Relation::Le, CLOCK_MAX));
        }
    }
    for p in space.params() {
        atoms.push(var_bound(p, Relation::Ge, 0));
        atoms.push(var_bound(p, Relation::Le, PARAM_MAX));
    }
    atoms
}

/// Random constraint list over a random space, kept raw so that tests can
/// rebuild it in other forms.
#[derive(Clone, Debug)]
pub struct PolyCase {
    pub clocks: usize,
    pub params: usize,
    pub bounded: bool,
    pub closed: bool,
    pub cons: Vec<RawConstraint>,
}

impl PolyCase {
    pub fn space(&self) -> VarSpace {
        space(self.clocks, self.params)
    }

    fn atoms(&self) -> Vec<AtomicConstraint> {
        let s = self.space();
        let mut atoms = frame(&s, self.bounded);
        atoms.extend(self.cons.iter().map(|c| {
            let mut c = c.clone();
            if self.closed {
                c.rel = match c.rel {
                    Relation::Lt => Relation::Le,
                    Relation::Gt => Relation::Ge,
                    r => r,
                };
            }
            c.atom(&s)
        }));
        atoms
    }

    pub fn poly(&self) -> Polyhedron {
        Polyhedron::new(&self.space(), &self.atoms()).unwrap()
    }
}

/// Non-empty random polyhedra over one or two clocks and one or two parameters.
pub fn poly_case(bounded: bool, closed: bool) -> impl Strategy<Value = PolyCase> {
    (1usize..=2, 1usize..=2, prop::collection::vec(raw_constraint(), 1..=3))
        .prop_map(move |(clocks, params, cons)| PolyCase {
            clocks,
            params,
            bounded,
            closed,
            cons,
        })
        .prop_filter("non-empty", |c| !c.poly().is_empty())
}

/// Random constraints over the parameters only, not clipped to the box.
pub fn param_case() -> impl Strategy<Value = (usize, Vec<RawConstraint>)> {
    (1usize..=2, prop::collection::vec(raw_constraint(), 1..=3))
}

/// A random rational point with non-negative coordinates and small denominators.
pub fn point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..=24, 1i64..=4), dim).prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
}

/// Reachable symbolic state of a random automaton: a seed and a walk.
#[derive(Clone, Debug)]
pub struct WalkCase {
    pub seed: u64,
    pub walk: u64,
    pub steps: usize,
}

pub fn walk_case() -> impl Strategy<Value = WalkCase> {
    (0u64..400, any::<u64>(), 0usize..=4).prop_map(|(seed, walk, steps)| WalkCase { seed, walk, steps })
}

/// Follows random enabled edges; stops early at deadlocks.
fn walk(sem: &Semantics, case: &WalkCase) -> Option<SymbolicState> {
    let mut rng = ChaCha8Rng::seed_from_u64(case.walk);
    let pta = sem.pta();
    let mut s = sem.initial_state()?;
    for _ in 0..case.steps {
        let mut next: Vec<SymbolicState> = Vec::new();
        for (i, e) in pta.edges.iter().enumerate() {
            if e.source == s.location {
                if let Some(t) = sem.successor(&s, i).unwrap() {
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        s = next.swap_remove(rng.gen_range(0..next.len()));
    }
    Some(s)
}

fn set_eq(a: &PolyhedralSet, b: &PolyhedralSet) -> bool {
    a.set_equals(b).unwrap()
}

fn integer_points(space: &VarSpace, lo: i64, hi: i64) -> Vec<Vec<Rational>> {
    let mut pts = vec![Vec::new()];
    for _ in 0..space.dim() {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                (lo..=hi).map(move |k| {
                    let mut p = p.clone();
                    p.push(q(k, 1));
                    p
                })
            })
            .collect();
    }
    pts
}

/// Extrapolates clocks in reverse declaration order.
fn extrapolate_reversed(c: &Polyhedron, m: i64, boundary: Boundary) -> PolyhedralSet {
    let mut cur: PolyhedralSet = c.clone().into();
    for clock in (0..c.space().num_clocks()).rev() {
        let mut next = PolyhedralSet::empty(c.space());
        for d in cur.disjuncts() {
            next = next.union(&extrapolate_clock(d, clock, m, boundary).unwrap()).unwrap();
        }
        cur = next;
    }
    cur
}

fn boundaries() -> [Boundary; 2] {
    [Boundary::Closed, Boundary::Strict]
}

/// The order in which clocks are extrapolated does not matter.
pub fn extrapolation_order(case: &PolyCase, m: i64) -> Check {
    let c = case.poly();
    for b in boundaries() {
        let a = extrapolate(&c, m, b);
        let r = extrapolate_reversed(&c, m, b);
        prop_assert!(set_eq(&a, &r), "{c} with M = {m}: {a} vs {r}");
    }
    Ok(())
}

/// Extrapolation keeps the parameter projection.
pub fn extrapolation_projection(case: &PolyCase, m: i64) -> Check {
    let c = case.poly();
    let direct: PolyhedralSet = c.project_to_params().into();
    for b in boundaries() {
        let e = extrapolate(&c, m, b).project_to_params();
        prop_assert!(set_eq(&direct, &e), "{c} with M = {m}: {direct} vs {e}");
    }
    Ok(())
}

/// Instantiating parameters commutes with extrapolation.
pub fn extrapolation_valuation(case: &PolyCase, m: i64, v: &[Rational]) -> Check {
    let c = case.poly();
    let v = &v[..case.params];
    for b in boundaries() {
        let after = extrapolate(&c, m, b);
        let after = after.disjuncts().iter().map(|d| d.substitute_params(v).unwrap());
        let cspace = c.space().clocks_only();
        let after = PolyhedralSet::from_disjuncts(&cspace, after).unwrap();
        let before = extrapolate(&c.substitute_params(v).unwrap(), m, b);
        prop_assert!(set_eq(&after, &before), "{c} at {v:?}: {after} vs {before}");
    }
    Ok(())
}

/// For integer valuations, the hull of an extrapolated reachable zone has the
/// same instance as the zone itself.
pub fn hull_integer_instances(case: &WalkCase, pick: u64) -> Check {
    let pta = random_pta(case.seed);
    let sem = Semantics::new(&pta);
    let Some(s) = walk(&sem, case) else { return Ok(()) };
    let ext = sem.extrapolate(&s.zone);
    let hull = ext.nnc_integer_hull().unwrap();
    let grid = polyparam::oracle::integer_points(&pta).unwrap();
    let v = &grid[(pick % grid.len() as u64) as usize];
    let cspace = pta.space().clocks_only();
    let inst = |set: &PolyhedralSet| {
        let ds = set.disjuncts().iter().map(|d| d.substitute_params(v).unwrap());
        PolyhedralSet::from_disjuncts(&cspace, ds).unwrap()
    };
    let (a, b) = (inst(&hull), inst(&ext));
    prop_assert!(set_eq(&a, &b), "seed {} zone {} at {v:?}: {a} vs {b}", case.seed, s.zone);
    Ok(())
}

fn succ_or_empty(sem: &Semantics, s: &SymbolicState, e: usize) -> Polyhedron {
    match sem.successor(s, e).unwrap() {
        Some(t) => t.zone,
        None => Polyhedron::empty(sem.space()),
    }
}

/// Taking the hull before a step does not change the hull after it.
pub fn hull_successor(case: &WalkCase) -> Check {
    let pta = random_pta(case.seed);
    let sem = Semantics::new(&pta);
    let Some(s) = walk(&sem, case) else { return Ok(()) };
    let hulled = SymbolicState {
        location: s.location,
        zone: s.zone.nnc_integer_hull().unwrap(),
    };
    for (i, e) in pta.edges.iter().enumerate() {
        if e.source != s.location {
            continue;
        }
        let a = succ_or_empty(&sem, &hulled, i).nnc_integer_hull().unwrap();
        let b = succ_or_empty(&sem, &s, i).nnc_integer_hull().unwrap();
        prop_assert!(
            a.set_equals(&b).unwrap(),
            "seed {} zone {} edge {i}: {a} vs {b}",
            case.seed,
            s.zone
        );
    }
    Ok(())
}

/// `C ⊆ C′` implies `Succ(C, e) ⊆ Succ(C′, e)`.
pub fn succ_monotone(case: &WalkCase, cut: &RawConstraint) -> Check {
    let pta = random_pta(case.seed);
    let sem = Semantics::new(&pta);
    let Some(s) = walk(&sem, case) else { return Ok(()) };
    let small = SymbolicState {
        location: s.location,
        zone: s.zone.with_atoms(&[cut.atom(sem.space())]).unwrap(),
    };
    for (i, e) in pta.edges.iter().enumerate() {
        if e.source == s.location {
            let a = succ_or_empty(&sem, &small, i);
            let b = succ_or_empty(&sem, &s, i);
            prop_assert!(b.includes(&a).unwrap(), "seed {} edge {i}: {a} not in {b}", case.seed);
        }
    }
    Ok(())
}

fn hull_sandwich(p: &Polyhedron, ih: &Polyhedron, again: &Polyhedron) -> Check {
    prop_assert!(p.includes(ih).unwrap(), "{ih} not inside {p}");
    prop_assert!(again.set_equals(ih).unwrap(), "not idempotent on {p}: {ih} then {again}");
    for w in integer_points(p.space(), -1, CLOCK_MAX + 1) {
        prop_assert_eq!(p.contains(&w).unwrap(), ih.contains(&w).unwrap(), "{} vs {} at {:?}", p, ih, w);
    }
    Ok(())
}

/// `IH(P) ⊆ P`, same integer points, idempotent; for both hull forms.
pub fn ih_sandwich(case: &PolyCase) -> Check {
    let p = case.poly();
    let ih = p.integer_hull().unwrap();
    prop_assert!(ih.is_closed());
    hull_sandwich(&p, &ih, &ih.integer_hull().unwrap())?;
    let nnc = p.nnc_integer_hull().unwrap();
    hull_sandwich(&p, &nnc, &nnc.nnc_integer_hull().unwrap())
}

/// `P ∪ (D \ P) = D` and `P ∩ (D \ P) = ∅` for the parameter box `D`.
pub fn complement_partition(params: usize, cons: &[RawConstraint]) -> Check {
    let s = space(0, params);
    let domain = Polyhedron::new(&s, &frame(&s, false)).unwrap();
    let atoms: Vec<AtomicConstraint> = cons.iter().map(|c| c.atom(&s)).collect();
    let raw = Polyhedron::new(&s, &atoms).unwrap();
    let domain: PolyhedralSet = domain.into();
    for p in [raw.clone(), raw.intersect(&domain.disjuncts()[0]).unwrap()] {
        let p: PolyhedralSet = p.into();
        let inside = p.intersection(&domain).unwrap();
        let comp = p.complement(&domain).unwrap();
        prop_assert!(set_eq(&inside.union(&comp).unwrap(), &domain), "{p}: complement {comp}");
        prop_assert!(inside.intersection(&comp).unwrap().is_empty(), "{p}: complement {comp}");
    }
    Ok(())
}

/// Closed polyhedra print equal text exactly when they are equal sets.
pub fn closed_text(a: &PolyCase, b: &PolyCase, perm: u64) -> Check {
    let pa = a.poly();
    // The same set built from shuffled, scaled and redundant constraints.
    let mut atoms = a.atoms();
    let mut rng = ChaCha8Rng::seed_from_u64(perm);
    for i in (1..atoms.len()).rev() {
        atoms.swap(i, rng.gen_range(0..=i));
    }
    let k = BigInt::from(rng.gen_range(2..=3));
    let scaled: Vec<AtomicConstraint> = atoms
        .iter()
        .map(|c| AtomicConstraint::new(c.term.scaled(&k), c.rel))
        .collect();
    let mut redundant = scaled.clone();
    if let Some(c) = atoms.iter().find(|c| matches!(c.rel, Relation::Le)) {
        redundant.push(AtomicConstraint::new(c.term.clone().plus_const(-1), Relation::Le));
    }
    let pb = Polyhedron::new(&a.space(), &redundant).unwrap();
    prop_assert!(pb.set_equals(&pa).unwrap());
    prop_assert_eq!(pa.to_text(), pb.to_text());

    if a.clocks == b.clocks && a.params == b.params {
        let pc = b.poly();
        prop_assert_eq!(pa.to_text() == pc.to_text(), pa.set_equals(&pc).unwrap(), "{} vs {}", pa, pc);
    }
    Ok(())
}

/// Constraints to generators and back give the same set.
pub fn duality(case: &PolyCase) -> Check {
    let p = case.poly();
    let g = p.generators();
    let mut points = g.points.clone();
    points.extend(g.closure_points.iter().cloned());
    let back = Polyhedron::from_generators(p.space(), &points, &g.rays, &g.lines).unwrap();
    if p.is_closed() {
        prop_assert!(g.closure_points.is_empty());
        prop_assert!(back.set_equals(&p).unwrap(), "{p} came back as {back}");
        prop_assert_eq!(back.to_text(), p.to_text());
    } else {
        prop_assert!(back.set_equals(&p.closure()).unwrap(), "{p} came back as {back}");
        for cp in &g.closure_points {
            prop_assert!(!p.contains(cp).unwrap());
        }
    }
    Ok(())
}

/// `Cyl_x(Cyl_y(P)) = Cyl_y(Cyl_x(P))` for any two variables.
pub fn cyl_commute(case: &PolyCase, i: usize, j: usize) -> Check {
    let p = case.poly();
    let n = p.dim();
    let (i, j) = (i % n, j % n);
    let a = p.cylindrify(i).unwrap().cylindrify(j).unwrap();
    let b = p.cylindrify(j).unwrap().cylindrify(i).unwrap();
    prop_assert!(a.set_equals(&b).unwrap(), "{p} on {i}, {j}: {a} vs {b}");
    Ok(())
}

fn point_poly(space: &VarSpace, w: &[Rational]) -> Polyhedron {
    let atoms: Vec<AtomicConstraint> = w
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let t = LinearTerm::var(space.name(i))
                .scaled(c.denom())
                .plus_const(-c.numer().clone());
            AtomicConstraint::new(t, Relation::Eq)
        })
        .collect();
    Polyhedron::new(space, &atoms).unwrap()
}

/// `w ∈ P↙ ⇔ {w}↗ ∩ P ≠ ∅` and `w ∈ P↗ ⇔ {w}↙ ∩ P ≠ ∅`, for a sampled point `w`.
pub fn elapse_past(case: &PolyCase, w: &[Rational]) -> Check {
    let p = case.poly();
    let w = &w[..p.dim()];
    let pt = point_poly(p.space(), w);
    let future_meets = !pt.time_elapse().intersect(&p).unwrap().is_empty();
    prop_assert_eq!(p.time_past().contains(w).unwrap(), future_meets, "{} at {:?}", p, w);
    let past_meets = !pt.time_past().intersect(&p).unwrap().is_empty();
    prop_assert_eq!(p.time_elapse().contains(w).unwrap(), past_meets, "{} at {:?}", p, w);
    Ok(())
}

/// Runs one check on `cases` generated inputs; the error names the failing input.
pub fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new(config).run(&strategy, check).map_err(|e| e.to_string())
}

/// Randomized invariants with their case counts: name, outcome.
pub fn invariant_suite() -> Vec<(&'static str, Result<(), String>)> {
    let m = 1i64..=4;
    vec![
        ("extrapolation order", run(100, (poly_case(false, false), m.clone()), |(c, m)| extrapolation_order(&c, m))),
        ("extrapolation projection", run(100, (poly_case(false, false), m.clone()), |(c, m)| extrapolation_projection(&c, m))),
        (
            "extrapolation valuation",
            run(100, (poly_case(false, false), m, point(2)), |(c, m, v)| extrapolation_valuation(&c, m, &v)),
        ),
        ("hull integer instances", run(100, (walk_case(), any::<u64>()), |(w, k)| hull_integer_instances(&w, k))),
        ("hull successor", run(100, walk_case(), |w| hull_successor(&w))),
        ("IH sandwich", run(200, poly_case(true, false), |c| ih_sandwich(&c))),
        (
            "complement partition",
            run(200, param_case(), |(n, cons)| complement_partition(n, &cons)),
        ),
    ]
}
