//! Difference-bound matrices over machine integers.
//!
//! Entry `(i, j)` bounds `x_i - x_j`, with index 0 the constant zero clock.
//! A bound `(c, ≤)` is encoded as `2c + 1`, `(c, <)` as `2c`, so smaller
//! encodings are tighter and the encodings are totally ordered.

use std::fmt;

pub type Bound = i64;

pub const INF: Bound = i64::MAX;
pub const LE_ZERO: Bound = 1;
pub const LT_ZERO: Bound = 0;

pub fn le(c: i64) -> Bound {
    2 * c + 1
}

pub fn lt(c: i64) -> Bound {
    2 * c
}

pub fn constant(b: Bound) -> i64 {
    b >> 1
}

pub fn is_strict(b: Bound) -> bool {
    b & 1 == 0
}

pub fn add(a: Bound, b: Bound) -> Bound {
    if a == INF || b == INF {
        return INF;
    }
    2 * (constant(a) + constant(b)) + (a & b & 1)
}

/// Complement of `x_i - x_j ⋈ c` expressed as a bound on `x_j - x_i`.
pub fn negate(b: Bound) -> Bound {
    debug_assert!(b != INF);
    if is_strict(b) {
        le(-constant(b))
    } else {
        lt(-constant(b))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    n: usize,
    m: Vec<Bound>,
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("Dbm(empty)");
        }
        let mut parts = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let b = self.get(i, j);
                if i != j && b != INF {
                    parts.push(format!(
                        "x{i}-x{j}{}{}",
                        if is_strict(b) { "<" } else { "<=" },
                        constant(b)
                    ));
                }
            }
        }
        write!(f, "Dbm({})", parts.join(", "))
    }
}

impl Dbm {
    /// All clocks equal to zero; `clocks` excludes the reference clock.
    pub fn zero(clocks: usize) -> Dbm {
        let n = clocks + 1;
        Dbm { n, m: vec![LE_ZERO; n * n] }
    }

    /// All non-negative valuations.
    pub fn universe(clocks: usize) -> Dbm {
        let n = clocks + 1;
        let mut m = vec![INF; n * n];
        for i in 0..n {
            m[i * n + i] = LE_ZERO;
            m[i] = LE_ZERO;
        }
        Dbm { n, m }
    }

    pub fn clocks(&self) -> usize {
        self.n - 1
    }

    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.n + j] = b;
    }

    pub fn is_empty(&self) -> bool {
        self.get(0, 0) < LE_ZERO
    }

    fn mark_empty(&mut self) {
        self.set(0, 0, LT_ZERO);
    }

    /// Floyd–Warshall closure; detects emptiness.
    pub fn canonicalize(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik == INF {
                    continue;
                }
                for j in 0..n {
                    let via = add(ik, self.get(k, j));
                    if via < self.get(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
        }
        if (0..n).any(|i| self.get(i, i) < LE_ZERO) {
            self.mark_empty();
        }
    }

    /// `x_i - x_j ⋈ c` added, then closed.
    pub fn constrain(&mut self, i: usize, j: usize, b: Bound) {
        if self.is_empty() {
            return;
        }
        if b < self.get(i, j) {
            self.set(i, j, b);
            self.canonicalize();
        }
    }

    pub fn intersect(&self, other: &Dbm) -> Dbm {
        let mut out = self.clone();
        if self.is_empty() || other.is_empty() {
            out.mark_empty();
            return out;
        }
        for (a, b) in out.m.iter_mut().zip(&other.m) {
            *a = (*a).min(*b);
        }
        out.canonicalize();
        out
    }

    /// Delay: drop upper bounds.
    pub fn up(&mut self) {
        if self.is_empty() {
            return;
        }
        for i in 1..self.n {
            self.set(i, 0, INF);
        }
    }

    /// Past within non-negative valuations.
    pub fn down(&mut self) {
        if self.is_empty() {
            return;
        }
        for j in 1..self.n {
            self.set(0, j, LE_ZERO);
        }
        self.canonicalize();
    }

    /// Sets clock `x` (1-based) to zero.
    pub fn reset(&mut self, x: usize) {
        if self.is_empty() {
            return;
        }
        for j in 0..self.n {
            if j != x {
                let (zj, jz) = (self.get(0, j), self.get(j, 0));
                self.set(x, j, zj);
                self.set(j, x, jz);
            }
        }
    }

    /// Unconstrains clock `x` (kept non-negative).
    pub fn free(&mut self, x: usize) {
        if self.is_empty() {
            return;
        }
        for j in 0..self.n {
            if j != x {
                self.set(x, j, INF);
                let jz = self.get(j, 0);
                self.set(j, x, jz);
            }
        }
        self.set(0, x, LE_ZERO);
        self.canonicalize();
    }

    /// Classic `Extra_M` with one bound for every clock.
    pub fn extrapolate(&mut self, max: i64) {
        if self.is_empty() {
            return;
        }
        let n = self.n;
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = self.get(i, j);
                let mi = if i == 0 { 0 } else { max };
                let mj = if j == 0 { 0 } else { max };
                if b != INF && b > le(mi) {
                    self.set(i, j, INF);
                    changed = true;
                } else if b < lt(-mj) {
                    self.set(i, j, lt(-mj));
                    changed = true;
                }
            }
        }
        if changed {
            self.canonicalize();
        }
    }

    /// Both canonical.
    pub fn includes(&self, other: &Dbm) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| a >= b)
    }

    /// `self \ other` as pairwise-disjoint zones.
    pub fn subtract(&self, other: &Dbm) -> Vec<Dbm> {
        if self.is_empty() {
            return Vec::new();
        }
        if other.is_empty() || self.intersect(other).is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let b = other.get(i, j);
                if i == j || b == INF || rest.get(i, j) <= b {
                    continue;
                }
                let mut outside = rest.clone();
                outside.constrain(j, i, negate(b));
                if !outside.is_empty() {
                    out.push(outside);
                }
                rest.constrain(i, j, b);
                if rest.is_empty() {
                    return out;
                }
            }
        }
        out
    }

    /// Does the valuation `w` (indexed by clock, scaled by `den`) lie in the zone?
    pub fn contains_scaled(&self, w: &[i64], den: i64) -> bool {
        if self.is_empty() {
            return false;
        }
        let val = |i: usize| if i == 0 { 0 } else { w[i - 1] };
        for i in 0..self.n {
            for j in 0..self.n {
                let b = self.get(i, j);
                if i == j || b == INF {
                    continue;
                }
                let d = val(i) - val(j);
                let c = constant(b) * den;
                if d > c || (d == c && is_strict(b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Union of zones.
pub fn federation_subtract(from: Vec<Dbm>, other: &Dbm) -> Vec<Dbm> {
    from.iter().flat_map(|z| z.subtract(other)).collect()
}
