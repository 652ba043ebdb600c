//! Integer hull by bounded enumeration.
//!
//! Every integer point of `P = conv(V) + cone(R) + lin(L)` is an enumerated
//! point plus a non-negative integer combination of rays and lines, where the
//! enumerated points lie in `V + [0,2)·R + [0,1)·L`. The slack of two ray
//! steps (instead of one) keeps the decomposition inside `P` when `P` is not
//! closed. Enumeration walks every integer prefix of the first `n-1`
//! coordinates of that box and solves the last coordinate exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::linear::ConstraintKind;
use super::polyhedron::Polyhedron;
use super::PolyError;
use crate::Rational;

/// Upper bound on enumerated integer prefixes before giving up.
pub const MAX_HULL_POINTS: usize = 2_000_000;

pub(crate) fn integer_hull(p: &Polyhedron) -> Result<Polyhedron, PolyError> {
    if p.is_empty() {
        return Ok(p.clone());
    }
    let space = p.space().clone();
    let n = p.dim();
    if n == 0 {
        return Ok(p.clone());
    }
    // Integral polyhedra (all vertices integer, closed) are their own hull.
    let g = p.generators();
    if p.is_closed() && g.closure_points.is_empty() && g.points.iter().all(|v| v.iter().all(|q| q.is_integer())) {
        return Ok(p.clone());
    }

    let mut lo = vec![BigInt::zero(); n];
    let mut hi = vec![BigInt::zero(); n];
    let verts: Vec<&Vec<Rational>> = g.points.iter().chain(&g.closure_points).collect();
    for i in 0..n {
        let mut min = verts[0][i].clone();
        let mut max = verts[0][i].clone();
        for v in &verts[1..] {
            if v[i] < min {
                min = v[i].clone();
            }
            if v[i] > max {
                max = v[i].clone();
            }
        }
        let mut l = min.floor().to_integer();
        let mut h = max.ceil().to_integer();
        for r in &g.rays {
            if r[i].is_negative() {
                l += &r[i] * 2;
            } else {
                h += &r[i] * 2;
            }
        }
        for d in &g.lines {
            l -= d[i].abs();
            h += d[i].abs();
        }
        lo[i] = l - 1;
        hi[i] = h + 1;
    }

    let mut cells: usize = 1;
    for i in 0..n - 1 {
        let w = (&hi[i] - &lo[i] + 1u32).to_usize().unwrap_or(usize::MAX);
        cells = cells.saturating_mul(w);
    }
    if cells > MAX_HULL_POINTS {
        return Err(PolyError::Unsupported(format!(
            "integer hull enumeration needs {cells} cells (limit {MAX_HULL_POINTS})"
        )));
    }

    let cons = p.constraints();
    let mut points: Vec<Vec<Rational>> = Vec::new();
    let mut prefix: Vec<BigInt> = lo[..n - 1].to_vec();
    loop {
        if let Some((a, b)) = last_coordinate_range(cons, &prefix, &lo[n - 1], &hi[n - 1]) {
            let mut pt: Vec<Rational> = prefix.iter().map(|x| Rational::from_integer(x.clone())).collect();
            pt.push(Rational::from_integer(a.clone()));
            points.push(pt.clone());
            if b != a {
                pt[n - 1] = Rational::from_integer(b);
                points.push(pt);
            }
        }
        // Odometer increment over the prefix box.
        let mut k = 0;
        loop {
            if k == n - 1 {
                return finish(p, &space, points);
            }
            prefix[k] += 1;
            if prefix[k] <= hi[k] {
                break;
            }
            prefix[k] = lo[k].clone();
            k += 1;
        }
    }
}

fn finish(p: &Polyhedron, space: &super::VarSpace, points: Vec<Vec<Rational>>) -> Result<Polyhedron, PolyError> {
    if points.is_empty() {
        return Ok(Polyhedron::empty(space));
    }
    let g = p.generators();
    let points = prune_points(points);
    Polyhedron::from_generators(space, &points, &g.rays, &g.lines)
}

fn prune_points(mut points: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    points.sort();
    points.dedup();
    points
}

/// Integer range of the last coordinate given fixed integer prefix, clipped to `[lo, hi]`.
fn last_coordinate_range(
    cons: &[super::Constraint],
    prefix: &[BigInt],
    lo: &BigInt,
    hi: &BigInt,
) -> Option<(BigInt, BigInt)> {
    let n = prefix.len();
    let mut min = lo.clone();
    let mut max = hi.clone();
    for c in cons {
        let mut r = c.constant.clone();
        for (a, x) in c.coeffs[..n].iter().zip(prefix) {
            if !a.is_zero() {
                r += a * x;
            }
        }
        let a = &c.coeffs[n];
        // a*y + r (kind) 0
        if a.is_zero() {
            let ok = match c.kind {
                ConstraintKind::Eq => r.is_zero(),
                ConstraintKind::Le => !r.is_positive(),
                ConstraintKind::Lt => r.is_negative(),
            };
            if !ok {
                return None;
            }
            continue;
        }
        let num = -r;
        match c.kind {
            ConstraintKind::Eq => {
                if !num.is_multiple_of(a) {
                    return None;
                }
                let y = &num / a;
                if y > min {
                    min = y.clone();
                }
                if y < max {
                    max = y;
                }
            }
            _ => {
                let strict = c.kind == ConstraintKind::Lt;
                if a.is_positive() {
                    // y <= num/a (strict: y < num/a)
                    let mut b = num.div_floor(a);
                    if strict && &b * a == num {
                        b -= 1;
                    }
                    if b < max {
                        max = b;
                    }
                } else {
                    // y >= num/a with a < 0
                    let mut b = num.div_ceil(a);
                    if strict && &b * a == num {
                        b += 1;
                    }
                    if b > min {
                        min = b;
                    }
                }
            }
        }
        if min > max {
            return None;
        }
    }
    Some((min, max))
}
