use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::pta::Pta;
use super::ModelError;
use crate::poly::Relation;
use crate::Rational;

/// `clock rel bound` with a concrete bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteAtom {
    pub clock: usize,
    pub rel: Relation,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteEdge {
    pub source: usize,
    pub guard: Vec<ConcreteAtom>,
    pub action: String,
    pub resets: Vec<usize>,
    pub target: usize,
}

/// Timed automaton obtained by fixing every parameter.
///
/// `scale` is the factor all constants were multiplied by; after
/// [`ConcreteTa::rescale`] every bound is an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteTa {
    pub clocks: Vec<String>,
    pub locations: Vec<String>,
    pub initial: usize,
    pub invariants: Vec<Vec<ConcreteAtom>>,
    pub edges: Vec<ConcreteEdge>,
    pub scale: BigInt,
}

impl Pta {
    /// Substitutes a parameter valuation, which must lie in the parameter box.
    pub fn instantiate(&self, v: &[Rational]) -> Result<ConcreteTa, ModelError> {
        if v.len() != self.params.len() {
            return Err(ModelError::Valuation(format!(
                "expected {} parameter values, got {}",
                self.params.len(),
                v.len()
            )));
        }
        for ((p, b), q) in self.params.iter().zip(&self.bounds).zip(v) {
            let lo = Rational::from_integer(BigInt::from(b.lower));
            let hi = Rational::from_integer(BigInt::from(b.upper));
            if *q < lo || *q > hi {
                return Err(ModelError::Valuation(format!(
                    "{p} = {q} lies outside [{}, {}]",
                    b.lower, b.upper
                )));
            }
        }
        let lookup = |name: &str| self.params.iter().position(|p| p == name).map(|i| v[i].clone());
        let conv = |atoms: &[super::ClockAtom]| -> Vec<ConcreteAtom> {
            atoms
                .iter()
                .map(|a| ConcreteAtom {
                    clock: a.clock,
                    rel: a.rel,
                    bound: a.bound.eval(lookup).expect("validated parameters"),
                })
                .collect()
        };
        Ok(ConcreteTa {
            clocks: self.clocks.clone(),
            locations: self.locations.clone(),
            initial: self.initial,
            invariants: self.invariants.iter().map(|i| conv(i)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| ConcreteEdge {
                    source: e.source,
                    guard: conv(&e.guard),
                    action: e.action.clone(),
                    resets: e.resets.clone(),
                    target: e.target,
                })
                .collect(),
            scale: BigInt::one(),
        })
    }
}

impl ConcreteTa {
    fn atoms(&self) -> impl Iterator<Item = &ConcreteAtom> {
        self.invariants.iter().flatten().chain(self.edges.iter().flat_map(|e| e.guard.iter()))
    }

    fn atoms_mut(&mut self) -> impl Iterator<Item = &mut ConcreteAtom> {
        self.invariants
            .iter_mut()
            .flatten()
            .chain(self.edges.iter_mut().flat_map(|e| e.guard.iter_mut()))
    }

    /// Multiplies every constant by the lcm of their denominators.
    pub fn rescale(&self) -> ConcreteTa {
        let mut l = BigInt::one();
        for a in self.atoms() {
            l = l.lcm(a.bound.denom());
        }
        let mut out = self.clone();
        let lq = Rational::from_integer(l.clone());
        for a in out.atoms_mut() {
            a.bound = &a.bound * &lq;
        }
        out.scale = &self.scale * l;
        out
    }

    pub fn has_integer_constants(&self) -> bool {
        self.atoms().all(|a| a.bound.is_integer())
    }

    /// Largest absolute constant (integer-constant automata only).
    pub fn max_constant(&self) -> i64 {
        self.atoms()
            .map(|a| a.bound.abs().to_integer().to_i64().expect("small constant"))
            .max()
            .unwrap_or(0)
    }

    pub fn outgoing(&self, loc: usize) -> impl Iterator<Item = &ConcreteEdge> {
        self.edges.iter().filter(move |e| e.source == loc)
    }

    /// Does a clock valuation satisfy a conjunction?
    pub fn satisfies(atoms: &[ConcreteAtom], w: &[Rational]) -> bool {
        atoms.iter().all(|a| a.rel.holds(&w[a.clock], &a.bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    const EX6: &str = "clocks: x\nparams: p in [0, 2]\ninit: l0\nloc l0\nloc l1\nedge l0 -> l1 on a when 1 <= x & x <= 2*p\n";

    #[test]
    fn substitution() {
        let pta = parse_model(EX6).unwrap();
        let t = pta.instantiate(&[q(1, 1)]).unwrap();
        let g = &t.edges[0].guard;
        assert_eq!((g[0].bound.clone(), g[1].bound.clone()), (q(1, 1), q(2, 1)));
        let t = pta.instantiate(&[q(1, 2)]).unwrap();
        assert_eq!(t.edges[0].guard[1].bound, q(1, 1));
        assert_eq!(t.rescale().scale, BigInt::one());
    }

    #[test]
    fn rescaling_uses_lcm() {
        let pta = parse_model(EX6).unwrap();
        let t = pta.instantiate(&[q(3, 4)]).unwrap().rescale();
        assert_eq!(t.scale, BigInt::from(2));
        assert_eq!(t.edges[0].guard[1].bound, q(3, 1));
        assert_eq!(t.edges[0].guard[0].bound, q(2, 1));
    }

    #[test]
    fn out_of_box_valuation_rejected() {
        let pta = parse_model(EX6).unwrap();
        assert!(pta.instantiate(&[q(3, 1)]).is_err());
    }
}
