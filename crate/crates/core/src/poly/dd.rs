//! Double-description conversion for polyhedral cones (Motzkin's incremental
//! algorithm with the combinatorial adjacency test).
//!
//! The cone is `{y | e·y = 0 for equalities, a·y ≥ 0 for inequalities}` in
//! integer homogeneous coordinates. The result is a set of lines and extreme
//! rays, each a primitive integer vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGenerators {
    pub lines: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

pub(crate) fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x = &*x / &g;
        }
    }
    v
}

/// `s·u - t·w`, reduced to a primitive vector.
fn combine(s: &BigInt, u: &[BigInt], t: &BigInt, w: &[BigInt]) -> Vec<BigInt> {
    primitive(u.iter().zip(w).map(|(a, b)| s * a - t * b).collect())
}

/// Computes lines and extreme rays of the cone in dimension `dim`.
pub(crate) fn cone_generators(dim: usize, equalities: &[Vec<BigInt>], inequalities: &[Vec<BigInt>]) -> ConeGenerators {
    let total = equalities.len() + inequalities.len();
    let mut lines: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            let mut v = vec![BigInt::zero(); dim];
            v[i] = BigInt::one();
            v
        })
        .collect();
    let mut rays: Vec<(Vec<BigInt>, Bits)> = Vec::new();

    let constraints = equalities
        .iter()
        .map(|c| (c, true))
        .chain(inequalities.iter().map(|c| (c, false)));

    for (k, (a, is_eq)) in constraints.enumerate() {
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        // Lines not orthogonal to the constraint absorb it.
        if let Some(li) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lines.swap_remove(li);
            let mut al = dot(a, &l);
            if al.is_negative() {
                l.iter_mut().for_each(|x| *x = -&*x);
                al = -al;
            }
            for other in lines.iter_mut() {
                let ao = dot(a, other);
                if !ao.is_zero() {
                    *other = combine(&al, other, &ao, &l);
                }
            }
            for (r, sat) in rays.iter_mut() {
                let ar = dot(a, r);
                if !ar.is_zero() {
                    *r = combine(&al, r, &ar, &l);
                }
                sat.set(k);
            }
            if !is_eq {
                // The old line saturated every earlier constraint.
                let mut sat = Bits::new(total);
                for j in 0..k {
                    sat.set(j);
                }
                rays.push((primitive(l), sat));
            }
            continue;
        }

        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (i, (r, _)) in rays.iter().enumerate() {
            let v = dot(a, r);
            if v.is_positive() {
                pos.push((i, v));
            } else if v.is_negative() {
                neg.push((i, v));
            } else {
                zero.push(i);
            }
        }
        if neg.is_empty() && (!is_eq || pos.is_empty()) {
            for &i in &zero {
                rays[i].1.set(k);
            }
            continue;
        }

        let min_common = dim.saturating_sub(lines.len() + 2);
        let mut created: Vec<(Vec<BigInt>, Bits)> = Vec::new();
        for (pi, pv) in &pos {
            for (ni, nv) in &neg {
                let common = rays[*pi].1.and(&rays[*ni].1);
                if common.count() < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(o, (_, s))| o == *pi || o == *ni || !common.subset_of(s));
                if !adjacent {
                    continue;
                }
                // pv > 0 > nv: pv·n - nv·p lies on the hyperplane.
                let r = combine(pv, &rays[*ni].0, nv, &rays[*pi].0);
                let mut sat = common;
                sat.set(k);
                created.push((r, sat));
            }
        }

        let mut next: Vec<(Vec<BigInt>, Bits)> = Vec::with_capacity(zero.len() + pos.len() + created.len());
        for &i in &zero {
            let mut r = rays[i].clone();
            r.1.set(k);
            next.push(r);
        }
        if !is_eq {
            for (i, _) in &pos {
                next.push(rays[*i].clone());
            }
        }
        next.extend(created);
        rays = next;
    }

    ConeGenerators {
        lines,
        rays: rays.into_iter().map(|(r, _)| r).collect(),
    }
}
