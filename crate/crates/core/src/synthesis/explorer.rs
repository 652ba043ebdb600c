use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;

use super::dot::{ExplorationTrace, TraceNode};
use super::{
    state_ceiling, Property, Stats, Status, SynthesisError, SynthesisRequest, SynthesisResult, Variant, DEFAULT_BUDGET,
};
use crate::poly::{Constraint, ConstraintKind, PolyhedralSet, Polyhedron, VarSpace};
use crate::symbolic::{Semantics, StateKey, SymbolicState};
use crate::Rational;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Reach,
    Unavoid,
    Trace,
}

enum Key {
    Hull(StateKey),
    Raw { location: usize, zone: Polyhedron, text: String },
}

impl Key {
    fn location(&self) -> usize {
        match self {
            Key::Hull(k) => k.location,
            Key::Raw { location, .. } => *location,
        }
    }

    fn text(&self) -> &str {
        match self {
            Key::Hull(k) => k.text(),
            Key::Raw { text, .. } => text,
        }
    }

    fn matches(&self, other: &Key) -> bool {
        match (self, other) {
            (Key::Hull(a), Key::Hull(b)) => a.matches(b),
            (Key::Raw { location: l1, zone: z1, text: t1 }, Key::Raw { location: l2, zone: z2, text: t2 }) => {
                l1 == l2 && (t1 == t2 || (!(z1.is_closed() && z2.is_closed()) && z1.set_equals(z2).unwrap_or(false)))
            }
            _ => false,
        }
    }
}

struct Frame {
    state: SymbolicState,
    node: Option<usize>,
    key: Key,
    edges: Vec<usize>,
    next_edge: usize,
    k: PolyhedralSet,
    live: PolyhedralSet,
    pending: Option<SymbolicState>,
}

enum Visit {
    Leaf(PolyhedralSet),
    Open(Box<Frame>),
}

struct Explorer<'a> {
    sem: Semantics<'a>,
    mode: Mode,
    variant: Variant,
    goals: BTreeSet<usize>,
    v0: Vec<Rational>,
    params: VarSpace,
    orthant: PolyhedralSet,
    budget: Option<usize>,
    exhausted: bool,
    ceiling: usize,
    keys_seen: HashMap<usize, HashSet<String>>,
    memo: HashMap<(usize, String), StateKey>,
    hull_projections: HashMap<String, PolyhedralSet>,
    projections: HashMap<String, PolyhedralSet>,
    successors: HashMap<(String, usize), Option<SymbolicState>>,
    matched: HashMap<(String, String), bool>,
    stats: Stats,
    trace: Option<ExplorationTrace>,
}

fn orthant(params: &VarSpace) -> PolyhedralSet {
    let cons = (0..params.dim())
        .map(|i| {
            let mut v = vec![BigInt::zero(); params.dim()];
            v[i] = BigInt::from(-1);
            Constraint::new(v, BigInt::zero(), ConstraintKind::Le)
        })
        .collect();
    Polyhedron::from_constraints(params, cons).into()
}

impl<'a> Explorer<'a> {
    fn over_budget(&self) -> bool {
        self.budget.is_some_and(|b| self.stats.states_explored >= b)
    }

    fn record(&mut self, state: &SymbolicState, parent: Option<usize>, action: Option<String>) -> Option<usize> {
        let trace = self.trace.as_mut()?;
        let id = trace.nodes.len();
        trace.nodes.push(TraceNode {
            id,
            parent,
            action,
            location: self.sem.pta().locations[state.location].clone(),
            zone: state.zone.to_text(),
            cut_to: None,
        });
        Some(id)
    }

    fn key(&mut self, state: &SymbolicState) -> Result<Key, SynthesisError> {
        let key = match self.variant {
            Variant::Reference => Key::Raw {
                location: state.location,
                zone: state.zone.clone(),
                text: state.zone.to_text(),
            },
            Variant::Hull | Variant::Integer => {
                let memo_key = (state.location, state.zone.to_text());
                if let Some(k) = self.memo.get(&memo_key) {
                    self.stats.cache_hits += 1;
                    Key::Hull(k.clone())
                } else {
                    let k = self.sem.hull_key(state)?;
                    self.memo.insert(memo_key, k.clone());
                    Key::Hull(k)
                }
            }
        };
        let seen = self.keys_seen.entry(key.location()).or_default();
        if !seen.contains(key.text()) {
            seen.insert(key.text().to_string());
            self.stats.max_keys_per_location = self.stats.max_keys_per_location.max(seen.len());
            if seen.len() > self.ceiling {
                return Err(SynthesisError::CeilingExceeded {
                    location: self.sem.pta().locations[key.location()].clone(),
                    ceiling: self.ceiling,
                });
            }
        }
        Ok(key)
    }

    fn matches(&mut self, a: &Key, b: &Key) -> bool {
        if a.location() != b.location() {
            return false;
        }
        if a.text() == b.text() {
            return true;
        }
        let pair = if a.text() < b.text() {
            (a.text().to_string(), b.text().to_string())
        } else {
            (b.text().to_string(), a.text().to_string())
        };
        if let Some(&m) = self.matched.get(&pair) {
            return m;
        }
        let m = a.matches(b);
        self.matched.insert(pair, m);
        m
    }

    fn project(&mut self, zone: &Polyhedron) -> PolyhedralSet {
        self.projections
            .entry(zone.to_text())
            .or_insert_with(|| zone.project_to_params().into())
            .clone()
    }

    fn project_hull(&self, zone: &Polyhedron) -> Result<PolyhedralSet, SynthesisError> {
        Ok(zone.nnc_integer_hull()?.project_to_params().into())
    }

    fn visit(
        &mut self,
        state: SymbolicState,
        parent: Option<usize>,
        action: Option<String>,
        path: &[Frame],
    ) -> Result<Visit, SynthesisError> {
        self.stats.states_explored += 1;
        let node = self.record(&state, parent, action);
        let mut k = match self.mode {
            Mode::Reach => PolyhedralSet::empty(&self.params),
            Mode::Unavoid => self.project(&state.zone),
            Mode::Trace => self.orthant.clone(),
        };
        match self.mode {
            Mode::Reach | Mode::Unavoid if self.goals.contains(&state.location) => {
                let k = match self.variant {
                    Variant::Integer => self.project_hull(&state.zone)?,
                    _ => self.project(&state.zone),
                };
                return Ok(Visit::Leaf(k));
            }
            Mode::Trace => {
                let proj = self.project(&state.zone);
                if !proj.contains(&self.v0)? {
                    let outside = proj.complement(&self.orthant)?;
                    let outside = match self.variant {
                        Variant::Reference => outside,
                        _ => outside.nnc_integer_hull()?,
                    };
                    return Ok(Visit::Leaf(k.intersection(&outside)?));
                }
            }
            _ => {}
        }
        let key = self.key(&state)?;
        if self.mode == Mode::Trace {
            let own = match &key {
                Key::Raw { .. } => self.project(&state.zone),
                Key::Hull(h) => self
                    .hull_projections
                    .entry(h.text().to_string())
                    .or_insert_with(|| h.hull.project_to_params())
                    .clone(),
            };
            k = k.intersection(&own)?;
        }
        let hit = path.iter().position(|f| self.matches(&f.key, &key)).map(|i| &path[i]);
        if let Some(hit) = hit {
            self.stats.passed_hits += 1;
            if let (Some(trace), Some(n)) = (self.trace.as_mut(), node) {
                trace.nodes[n].cut_to = hit.node;
            }
            return Ok(Visit::Leaf(match self.mode {
                Mode::Trace => k,
                _ => PolyhedralSet::empty(&self.params),
            }));
        }
        let edges = self
            .sem
            .pta()
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.source == state.location)
            .map(|(i, _)| i)
            .collect();
        Ok(Visit::Open(Box::new(Frame {
            live: PolyhedralSet::empty(self.sem.space()),
            state,
            node,
            key,
            edges,
            next_edge: 0,
            k,
            pending: None,
        })))
    }

    fn combine(&mut self, frame: &mut Frame, edge: usize, child: &SymbolicState, kc: PolyhedralSet) -> Result<(), SynthesisError> {
        match self.mode {
            Mode::Reach => frame.k = frame.k.union(&kc)?,
            Mode::Trace => frame.k = frame.k.intersection(&kc)?,
            Mode::Unavoid => {
                let reached = match self.variant {
                    Variant::Integer => self.project_hull(&child.zone)?,
                    _ => self.project(&child.zone),
                };
                let blocked = self.orthant.difference(&reached)?;
                frame.k = frame.k.intersection(&kc.union(&blocked)?)?;
                let enabled = frame.state.zone.intersect(self.sem.guard(edge))?.time_past();
                frame.live = frame.live.union(&enabled.into())?;
            }
        }
        Ok(())
    }

    fn finish(&mut self, frame: Frame) -> Result<PolyhedralSet, SynthesisError> {
        let mut k = frame.k;
        if self.mode == Mode::Unavoid {
            let stuck = PolyhedralSet::from(frame.state.zone).difference(&frame.live)?;
            k = k.difference(&stuck.project_to_params())?;
        }
        Ok(k.coalesce())
    }

    /// Depth-first exploration with an explicit stack; returns the root's set.
    fn explore(&mut self, root: SymbolicState) -> Result<PolyhedralSet, SynthesisError> {
        let mut stack: Vec<Frame> = Vec::new();
        let mut done: Option<(PolyhedralSet, SymbolicState)> = None;
        match self.visit(root, None, None, &stack)? {
            Visit::Leaf(k) => return Ok(k),
            Visit::Open(f) => stack.push(*f),
        }
        loop {
            if let Some((kc, child)) = done.take() {
                let mut top = stack.pop().expect("parent frame");
                let edge = top.edges[top.next_edge - 1];
                self.combine(&mut top, edge, &child, kc)?;
                stack.push(top);
            }
            let top = stack.last_mut().expect("non-empty stack");
            let mut next = None;
            while top.next_edge < top.edges.len() && !self.exhausted {
                let edge = top.edges[top.next_edge];
                top.next_edge += 1;
                let text = top.state.zone.to_text();
                let child = match self.successors.get(&(text.clone(), edge)) {
                    Some(c) => c.clone(),
                    None => {
                        let c = self.sem.successor(&top.state, edge)?;
                        self.successors.insert((text, edge), c.clone());
                        c
                    }
                };
                if let Some(child) = child {
                    next = Some((edge, child));
                    break;
                }
            }
            match next {
                Some((edge, child)) => {
                    if self.over_budget() {
                        self.exhausted = true;
                        continue;
                    }
                    let parent = stack.last().and_then(|f| f.node);
                    let action = self.sem.pta().edges[edge].action.clone();
                    match self.visit(child.clone(), parent, Some(action), &stack)? {
                        Visit::Leaf(kc) => done = Some((kc, child)),
                        Visit::Open(f) => {
                            stack.last_mut().expect("parent").pending = Some(child);
                            stack.push(*f);
                        }
                    }
                }
                None => {
                    let frame = stack.pop().expect("frame");
                    let k = self.finish(frame)?;
                    match stack.last_mut() {
                        None => return Ok(k),
                        Some(parent) => {
                            let child = parent.pending.take().expect("pending child");
                            done = Some((k, child));
                        }
                    }
                }
            }
        }
    }
}

fn is_integer_point(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub(super) fn run(req: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError> {
    let started = Instant::now();
    let pta = req.pta;
    let params = pta.space().params_only();
    let (mode, goals, v0) = match &req.property {
        Property::Reach(g) => (Mode::Reach, g.clone(), Vec::new()),
        Property::Unavoid(g) => (Mode::Unavoid, g.clone(), Vec::new()),
        Property::TracePreserve(v) => (Mode::Trace, BTreeSet::new(), v.clone()),
    };
    if goals.iter().any(|&l| l >= pta.locations.len()) {
        return Err(SynthesisError::InvalidRequest("goal refers to an undeclared location".into()));
    }
    let sem = Semantics::new(pta);
    let pbox: PolyhedralSet = sem.param_box().project_to_params().into();
    if mode == Mode::Trace {
        if v0.len() != pta.params.len() {
            return Err(SynthesisError::InvalidRequest(format!(
                "reference valuation has {} values for {} parameters",
                v0.len(),
                pta.params.len()
            )));
        }
        if !pbox.contains(&v0)? {
            return Err(SynthesisError::InvalidRequest("reference valuation lies outside the parameter box".into()));
        }
        match req.variant {
            Variant::Integer => {
                return Err(SynthesisError::InvalidRequest("trace preservation has no integer-only variant".into()))
            }
            Variant::Hull if !is_integer_point(&v0) => {
                return Err(SynthesisError::InvalidRequest("the reference valuation must be integer".into()))
            }
            _ => {}
        }
    }
    let budget = match (req.variant, req.budget) {
        (Variant::Reference, b) => Some(b.unwrap_or(DEFAULT_BUDGET)),
        (_, None) => None,
        (_, Some(_)) => {
            return Err(SynthesisError::InvalidRequest("a budget applies to the reference variants only".into()))
        }
    };
    let mut ex = Explorer {
        mode,
        variant: req.variant,
        goals,
        v0,
        orthant: orthant(&params),
        params: params.clone(),
        budget,
        exhausted: false,
        ceiling: state_ceiling(),
        keys_seen: HashMap::new(),
        memo: HashMap::new(),
        hull_projections: HashMap::new(),
        projections: HashMap::new(),
        successors: HashMap::new(),
        matched: HashMap::new(),
        stats: Stats {
            max_constant: sem.max_constant(),
            ..Stats::default()
        },
        trace: req.record_trace.then(ExplorationTrace::default),
        sem,
    };
    let k = match ex.sem.initial_state() {
        Some(root) => ex.explore(root)?,
        None if mode == Mode::Trace => pbox.clone(),
        None => PolyhedralSet::empty(&params),
    };
    let valuations = k.intersection(&pbox)?.coalesce();
    let mut stats = ex.stats;
    stats.wall_time = started.elapsed();
    Ok(SynthesisResult {
        valuations,
        status: if ex.exhausted { Status::BudgetExhausted } else { Status::Complete },
        stats,
        trace: ex.trace,
    })
}
