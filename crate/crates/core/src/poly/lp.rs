//! Exact rational simplex used for emptiness, implicit-equality and
//! redundancy tests on constraint systems with strict inequalities.
//!
//! Strictness is handled with a slack variable ε: the system
//! `{a·x + b ≤ 0, a'·x + b' < 0}` is non-empty iff the maximum of ε under
//! `a'·x + b' + ε ≤ 0, ε ≤ 1` is positive.

use num_traits::{One, Signed, Zero};

use super::linear::{Constraint, ConstraintKind};
use crate::Rational;

struct Tableau {
    /// m constraint rows followed by the objective row; last column is the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    /// Current basic solution for the split variables `x+ - x-`.
    fn point(&self, dim: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); dim];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < dim {
                x[b] += self.rhs(i);
            } else if b < 2 * dim {
                x[b - dim] -= self.rhs(i);
            }
        }
        x
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes the objective encoded in the last row (stored as reduced
    /// costs `z_j - c_j`) with Bland's rule. Columns with `allowed[j] == false`
    /// never enter the basis.
    fn run(&mut self, allowed: &[bool]) -> Outcome {
        let obj = self.m();
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.rows[obj][j].is_negative());
            let Some(j) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.m() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((i, _)) => self.pivot(i, j),
                None => return Outcome::Unbounded,
            }
        }
    }
}

/// Maximum of ε over `{rows, ε ≥ 0, ε ≤ 1}` where ε is added to every
/// inequality row for which `uses_eps` holds. Returns `None` when the system
/// is infeasible even at ε = 0.
pub(crate) fn max_slack(dim: usize, rows: &[&Constraint], uses_eps: impl Fn(&Constraint) -> bool) -> Option<Rational> {
    slack_point(dim, rows, uses_eps).map(|(eps, _)| eps)
}

/// Like [`max_slack`], also returning a point attaining the slack.
pub(crate) fn slack_point(
    dim: usize,
    rows: &[&Constraint],
    uses_eps: impl Fn(&Constraint) -> bool,
) -> Option<(Rational, Vec<Rational>)> {
    let eps_rows: Vec<bool> = rows
        .iter()
        .map(|c| c.kind != ConstraintKind::Eq && uses_eps(c))
        .collect();
    let any_eps = eps_rows.iter().any(|&b| b);

    // Column layout: x+ (dim), x- (dim), eps, slacks (one per inequality row
    // plus one for eps <= 1), artificials (one per row).
    let n_ineq = rows.iter().filter(|c| c.kind != ConstraintKind::Eq).count();
    let eps_col = 2 * dim;
    let slack0 = eps_col + 1;
    let eps_slack = slack0 + n_ineq;
    let m = rows.len() + 1;
    let art0 = eps_slack + 1;
    let cols = art0 + m;

    let mut tab_rows: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    let mut basis = Vec::with_capacity(m);
    let mut slack = slack0;
    for (r, c) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        for (i, a) in c.coeffs.iter().enumerate() {
            if !a.is_zero() {
                row[i] = Rational::from_integer(a.clone());
                row[dim + i] = Rational::from_integer(-a);
            }
        }
        if eps_rows[r] {
            row[eps_col] = Rational::one();
        }
        let mut slack_col = None;
        if c.kind != ConstraintKind::Eq {
            row[slack] = Rational::one();
            slack_col = Some(slack);
            slack += 1;
        }
        row[cols] = Rational::from_integer(-&c.constant);
        if row[cols].is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
            slack_col = None;
        }
        row[art0 + r] = Rational::one();
        basis.push(slack_col.unwrap_or(art0 + r));
        tab_rows.push(row);
    }
    {
        let mut row = vec![Rational::zero(); cols + 1];
        row[eps_col] = Rational::one();
        row[eps_slack] = Rational::one();
        row[art0 + rows.len()] = Rational::one();
        row[cols] = Rational::one();
        basis.push(eps_slack);
        tab_rows.push(row);
    }

    // Phase 1: maximize -(sum of basic artificials).
    let mut obj = vec![Rational::zero(); cols + 1];
    for (i, &b) in basis.iter().enumerate() {
        if b >= art0 {
            for (o, v) in obj.iter_mut().zip(&tab_rows[i]) {
                *o -= v;
            }
            // The artificial column itself has reduced cost 0 once basic.
        }
    }
    for a in art0..cols {
        obj[a] = Rational::zero();
    }
    // Non-basic artificials carry cost 1 in the minimization; they are simply
    // excluded from entering.
    tab_rows.push(obj);
    let mut tab = Tableau {
        rows: tab_rows,
        basis,
        cols,
    };
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(art0) {
        *a = false;
    }
    if !any_eps {
        allowed[eps_col] = false;
    }
    let _ = tab.run(&allowed);
    // Objective value is -(sum of artificials); rhs of objective row holds it.
    if tab.rows[tab.m()][cols].is_negative() {
        return None;
    }
    if !any_eps {
        return Some((Rational::zero(), tab.point(dim)));
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..tab.m() {
        if tab.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }
    // Phase 2: maximize eps.
    let obj_row = tab.m();
    let mut obj = vec![Rational::zero(); cols + 1];
    obj[eps_col] = -Rational::one();
    for i in 0..tab.m() {
        if tab.basis[i] == eps_col {
            for (o, v) in obj.iter_mut().zip(&tab.rows[i]) {
                *o += v;
            }
        }
    }
    tab.rows[obj_row] = obj;
    match tab.run(&allowed) {
        Outcome::Optimal => Some((tab.rows[obj_row][cols].clone(), tab.point(dim))),
        // eps <= 1 bounds the objective.
        Outcome::Unbounded => unreachable!("slack objective is bounded"),
    }
}

/// Is the conjunction of `rows` satisfiable over the rationals (strict rows strictly)?
pub(crate) fn feasible(dim: usize, rows: &[&Constraint]) -> bool {
    if rows.iter().any(|c| c.is_trivial_vars() && !c.constant_holds()) {
        return false;
    }
    let any_strict = rows.iter().any(|c| c.kind == ConstraintKind::Lt);
    match max_slack(dim, rows, |c| c.kind == ConstraintKind::Lt) {
        None => false,
        Some(eps) => !any_strict || eps.is_positive(),
    }
}
