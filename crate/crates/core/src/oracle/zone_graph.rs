use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::ToPrimitive;

use super::dbm::{le, lt, Dbm};
use super::OracleError;
use crate::model::{ConcreteAtom, ConcreteTa};
use crate::poly::Relation;

/// Concrete automaton with integer constants, as the zone machinery needs it.
#[derive(Clone, Debug)]
pub struct IntegerTa {
    pub clocks: usize,
    pub locations: Vec<String>,
    pub initial: usize,
    pub invariants: Vec<Dbm>,
    pub edges: Vec<IntegerEdge>,
    pub max_constant: i64,
}

#[derive(Clone, Debug)]
pub struct IntegerEdge {
    pub source: usize,
    pub guard: Dbm,
    pub action: String,
    pub resets: Vec<usize>,
    pub target: usize,
}

fn atoms_to_dbm(clocks: usize, atoms: &[ConcreteAtom]) -> Result<Dbm, OracleError> {
    let mut z = Dbm::universe(clocks);
    for a in atoms {
        if !a.bound.is_integer() {
            return Err(OracleError::NonIntegerConstant);
        }
        let k = a.bound.to_integer().to_i64().ok_or(OracleError::ConstantTooLarge)?;
        if k.abs() > (1 << 60) {
            return Err(OracleError::ConstantTooLarge);
        }
        let x = a.clock + 1;
        match a.rel {
            Relation::Le => z.constrain(x, 0, le(k)),
            Relation::Lt => z.constrain(x, 0, lt(k)),
            Relation::Ge => z.constrain(0, x, le(-k)),
            Relation::Gt => z.constrain(0, x, lt(-k)),
            Relation::Eq => {
                z.constrain(x, 0, le(k));
                z.constrain(0, x, le(-k));
            }
        }
    }
    Ok(z)
}

impl IntegerTa {
    pub fn new(ta: &ConcreteTa) -> Result<IntegerTa, OracleError> {
        let n = ta.clocks.len();
        let invariants = ta
            .invariants
            .iter()
            .map(|i| atoms_to_dbm(n, i))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = ta
            .edges
            .iter()
            .map(|e| {
                Ok(IntegerEdge {
                    source: e.source,
                    guard: atoms_to_dbm(n, &e.guard)?,
                    action: e.action.clone(),
                    resets: e.resets.iter().map(|r| r + 1).collect(),
                    target: e.target,
                })
            })
            .collect::<Result<Vec<_>, OracleError>>()?;
        Ok(IntegerTa {
            clocks: n,
            locations: ta.locations.clone(),
            initial: ta.initial,
            invariants,
            edges,
            max_constant: ta.max_constant(),
        })
    }

    fn initial_zone(&self) -> Dbm {
        let inv = &self.invariants[self.initial];
        let mut z = Dbm::zero(self.clocks).intersect(inv);
        z.up();
        z.intersect(inv)
    }

    /// Delay-free discrete step followed by delay; `None` when empty.
    fn post(&self, z: &Dbm, edge: &IntegerEdge) -> Option<Dbm> {
        let mut z = z.intersect(&edge.guard);
        if z.is_empty() {
            return None;
        }
        for &r in &edge.resets {
            z.reset(r);
        }
        let inv = &self.invariants[edge.target];
        let mut z = z.intersect(inv);
        if z.is_empty() {
            return None;
        }
        z.up();
        let z = z.intersect(inv);
        (!z.is_empty()).then_some(z)
    }

    /// `{w | w[R := 0] ∈ S}`.
    fn pre_reset(&self, s: &Dbm, resets: &[usize]) -> Dbm {
        let mut z = s.clone();
        for &r in resets {
            z.constrain(r, 0, le(0));
        }
        for &r in resets {
            z.free(r);
        }
        z
    }

    /// Valuations of `z` that can delay and then take `edge` into the target invariant.
    fn enabled_part(&self, z: &Dbm, edge: &IntegerEdge) -> Dbm {
        let target = self.pre_reset(&self.invariants[edge.target], &edge.resets);
        let mut s = z.intersect(&self.invariants[edge.source]).intersect(&edge.guard).intersect(&target);
        s.down();
        s.intersect(z)
    }
}

/// Zone graph from the initial state, one node per distinct (location, zone).
#[derive(Clone, Debug)]
pub struct ZoneGraph {
    pub nodes: Vec<(usize, Dbm)>,
    /// Per node: (edge index, successor node).
    pub succ: Vec<Vec<(usize, usize)>>,
    pub initial: Option<usize>,
    /// False when a depth limit cut the construction.
    pub complete: bool,
}

impl ZoneGraph {
    /// Extrapolated with the automaton's own largest constant.
    pub fn build(ta: &IntegerTa) -> ZoneGraph {
        Self::build_with(ta, Some(ta.max_constant), None)
    }

    /// `extrapolation = None` disables widening; then `depth` should bound the search.
    pub fn build_with(ta: &IntegerTa, extrapolation: Option<i64>, depth: Option<usize>) -> ZoneGraph {
        let mut g = ZoneGraph {
            nodes: Vec::new(),
            succ: Vec::new(),
            initial: None,
            complete: true,
        };
        let widen = |mut z: Dbm| {
            if let Some(m) = extrapolation {
                z.extrapolate(m);
            }
            z
        };
        let init = ta.initial_zone();
        if init.is_empty() {
            return g;
        }
        let mut index: HashMap<(usize, Dbm), usize> = HashMap::new();
        let root = (ta.initial, widen(init));
        index.insert(root.clone(), 0);
        g.nodes.push(root);
        g.succ.push(Vec::new());
        g.initial = Some(0);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((n, d)) = queue.pop_front() {
            if depth.is_some_and(|limit| d >= limit) {
                g.complete = false;
                continue;
            }
            let (loc, z) = g.nodes[n].clone();
            for (ei, e) in ta.edges.iter().enumerate() {
                if e.source != loc {
                    continue;
                }
                let Some(z2) = ta.post(&z, e) else { continue };
                let key = (e.target, widen(z2));
                let m = match index.get(&key) {
                    Some(&m) => m,
                    None => {
                        let m = g.nodes.len();
                        index.insert(key.clone(), m);
                        g.nodes.push(key);
                        g.succ.push(Vec::new());
                        queue.push_back((m, d + 1));
                        m
                    }
                };
                g.succ[n].push((ei, m));
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn reaches(&self, goals: &BTreeSet<usize>) -> bool {
        self.nodes.iter().any(|(l, _)| goals.contains(l))
    }
}

pub fn reachable(ta: &IntegerTa, goals: &BTreeSet<usize>) -> bool {
    ZoneGraph::build(ta).reaches(goals)
}

/// Every maximal discrete run visits `goals`.
pub fn unavoidable(ta: &IntegerTa, goals: &BTreeSet<usize>) -> bool {
    let g = ZoneGraph::build(ta);
    let Some(root) = g.initial else { return false };
    // Iterative DFS over non-goal nodes; grey nodes on the stack reveal cycles.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark = vec![Mark::White; g.len()];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let enter = |n: usize, mark: &mut Vec<Mark>, stack: &mut Vec<(usize, usize)>| -> bool {
        let (loc, z) = &g.nodes[n];
        if goals.contains(loc) {
            mark[n] = Mark::Black;
            return true;
        }
        let live = ta
            .edges
            .iter()
            .filter(|e| e.source == *loc)
            .map(|e| ta.enabled_part(z, e))
            .filter(|p| !p.is_empty());
        let mut rest = vec![z.clone()];
        for p in live {
            rest = super::dbm::federation_subtract(rest, &p);
            if rest.is_empty() {
                break;
            }
        }
        if !rest.is_empty() {
            return false;
        }
        mark[n] = Mark::Grey;
        stack.push((n, 0));
        true
    };
    if !enter(root, &mut mark, &mut stack) {
        return false;
    }
    while let Some(&(n, next)) = stack.last() {
        if next < g.succ[n].len() {
            let (_, m) = g.succ[n][next];
            stack.last_mut().expect("top").1 += 1;
            match mark[m] {
                Mark::Grey => return false,
                Mark::Black => {}
                Mark::White => {
                    if !enter(m, &mut mark, &mut stack) {
                        return false;
                    }
                }
            }
        } else {
            mark[n] = Mark::Black;
            stack.pop();
        }
    }
    true
}

type Label = (String, String);

fn label_map(ta: &IntegerTa, g: &ZoneGraph) -> Vec<BTreeMap<Label, BTreeSet<usize>>> {
    g.succ
        .iter()
        .map(|out| {
            let mut m: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
            for &(ei, t) in out {
                let e = &ta.edges[ei];
                m.entry((e.action.clone(), ta.locations[e.target].clone())).or_default().insert(t);
            }
            m
        })
        .collect()
}

/// Equality of untimed trace sets over (action, target location) labels.
pub fn trace_equal(a: &IntegerTa, b: &IntegerTa) -> Result<bool, OracleError> {
    fn sorted(ta: &IntegerTa) -> (BTreeSet<&str>, BTreeSet<&str>) {
        let l = ta.locations.iter().map(String::as_str).collect();
        let acts = ta.edges.iter().map(|e| e.action.as_str()).collect();
        (l, acts)
    }
    if sorted(a) != sorted(b) {
        return Err(OracleError::AlphabetMismatch);
    }
    let (ga, gb) = (ZoneGraph::build(a), ZoneGraph::build(b));
    let (ra, rb) = match (ga.initial, gb.initial) {
        (None, None) => return Ok(true),
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(false),
    };
    if a.locations[a.initial] != b.locations[b.initial] {
        return Ok(false);
    }
    let (la, lb) = (label_map(a, &ga), label_map(b, &gb));
    let start = (BTreeSet::from([ra]), BTreeSet::from([rb]));
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((sa, sb)) = queue.pop_front() {
        let mut labels: BTreeSet<&Label> = BTreeSet::new();
        for &n in &sa {
            labels.extend(la[n].keys());
        }
        for &n in &sb {
            labels.extend(lb[n].keys());
        }
        for l in labels {
            let na: BTreeSet<usize> = sa.iter().filter_map(|&n| la[n].get(l)).flatten().copied().collect();
            let nb: BTreeSet<usize> = sb.iter().filter_map(|&n| lb[n].get(l)).flatten().copied().collect();
            if na.is_empty() != nb.is_empty() {
                return Ok(false);
            }
            let pair = (na, nb);
            if seen.insert(pair.clone()) {
                queue.push_back(pair);
            }
        }
    }
    Ok(true)
}
