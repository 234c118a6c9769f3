//! Exact linear programming over Q: two-phase tableau simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::num::{dot, nullspace, rref, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

/// A row `a · x ≤ b` or `a · x = b`.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<Rat>,
    pub b: Rat,
}

impl Row {
    pub fn new(a: Vec<Rat>, b: Rat) -> Row {
        Row { a, b }
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        self.rhs[r] /= &p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj · vars` over columns not in `banned`. Returns false when unbounded.
    fn run(&mut self, obj: &[Rat], banned: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if banned[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = obj[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !obj[bi].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &obj[bi] * &self.rows[i][j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][c];
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value_of(&self, j: usize) -> Rat {
        self.basis.iter().position(|&b| b == j).map_or_else(Rat::zero, |i| self.rhs[i].clone())
    }
}

/// Maximizes `c · x` over free `x ∈ Q^n` subject to `le` rows (`a·x ≤ b`) and `eq` rows.
pub fn maximize(n: usize, c: &[Rat], le: &[Row], eq: &[Row]) -> LpOutcome {
    // Parametrize the equality solutions: x = x0 + Σ y_k d_k.
    let (x0, dirs) = if eq.is_empty() {
        let id: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
        (vec![Rat::zero(); n], id)
    } else {
        let mut aug: Vec<Vec<Rat>> = eq
            .iter()
            .map(|r| {
                let mut row = r.a.clone();
                row.push(r.b.clone());
                row
            })
            .collect();
        let pivots = rref(&mut aug);
        if pivots.contains(&n) {
            return LpOutcome::Infeasible;
        }
        let mut x0 = vec![Rat::zero(); n];
        for (row, &p) in aug.iter().zip(&pivots) {
            x0[p] = row[n].clone();
        }
        let rows: Vec<Vec<Rat>> = eq.iter().map(|r| r.a.clone()).collect();
        (x0, nullspace(&rows, n))
    };
    let k = dirs.len();
    // Free y = y⁺ − y⁻, giving 2k nonnegative structural columns.
    let m = le.len();
    let ncols = 2 * k + m + 1;
    let aux = ncols - 1;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, r) in le.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols];
        for (j, d) in dirs.iter().enumerate() {
            let v = dot(&r.a, d);
            row[k + j] = -v.clone();
            row[j] = v;
        }
        row[2 * k + i] = Rat::one();
        row[aux] = -Rat::one();
        rows.push(row);
        rhs.push(&r.b - dot(&r.a, &x0));
    }
    let mut t = Tableau { rows, rhs, basis: (0..m).map(|i| 2 * k + i).collect(), ncols };
    let mut banned = vec![false; ncols];
    if let Some((r, _)) = t.rhs.iter().enumerate().filter(|(_, b)| b.is_negative()).min_by(|a, b| a.1.cmp(b.1)) {
        t.pivot(r, aux);
        let mut obj1 = vec![Rat::zero(); ncols];
        obj1[aux] = -Rat::one();
        t.run(&obj1, &banned);
        if t.value_of(aux).is_positive() {
            return LpOutcome::Infeasible;
        }
        if let Some(r) = t.basis.iter().position(|&b| b == aux) {
            match (0..aux).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                }
            }
        }
    }
    banned[aux] = true;
    let mut obj = vec![Rat::zero(); ncols];
    for (j, d) in dirs.iter().enumerate() {
        let v = dot(c, d);
        obj[k + j] = -v.clone();
        obj[j] = v;
    }
    if !t.run(&obj, &banned) {
        return LpOutcome::Unbounded;
    }
    let mut x = x0;
    for (j, d) in dirs.iter().enumerate() {
        let y = t.value_of(j) - t.value_of(k + j);
        if y.is_zero() {
            continue;
        }
        for (xi, di) in x.iter_mut().zip(d) {
            *xi += &y * di;
        }
    }
    let value = dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Some point satisfying the rows, if any.
pub fn feasible_point(n: usize, le: &[Row], eq: &[Row]) -> Option<Vec<Rat>> {
    match maximize(n, &vec![Rat::zero(); n], le, eq) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, ratio};

    fn row(a: &[i64], b: i64) -> Row {
        Row::new(a.iter().map(|&x| rat(x)).collect(), rat(b))
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 6, x ≤ 3, x, y ≥ 0.
        let le = [row(&[1, 1], 4), row(&[1, 3], 6), row(&[1, 0], 3), row(&[-1, 0], 0), row(&[0, -1], 0)];
        match maximize(2, &[rat(3), rat(2)], &le, &[]) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, rat(11));
                assert_eq!(x, vec![rat(3), rat(1)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        assert_eq!(maximize(1, &[rat(1)], &[row(&[1], -1), row(&[-1], -1)], &[]), LpOutcome::Infeasible);
        assert_eq!(maximize(1, &[rat(1)], &[row(&[-1], 0)], &[]), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // max x subject to x + y = 1, y ≥ 1/2 (written -y ≤ -1/2).
        let le = [Row::new(vec![rat(0), rat(-1)], ratio(-1, 2))];
        let eq = [row(&[1, 1], 1)];
        match maximize(2, &[rat(1), rat(0)], &le, &eq) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(1, 2)),
            o => panic!("{o:?}"),
        }
        assert_eq!(maximize(1, &[rat(0)], &[], &[row(&[0], 1)]), LpOutcome::Infeasible);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        let le = [row(&[1, 1], 0), row(&[1, -1], 0), row(&[-1, 0], 0), row(&[1, 2], 0), row(&[0, 1], 1)];
        assert!(matches!(maximize(2, &[rat(1), rat(1)], &le, &[]), LpOutcome::Optimal { .. }));
    }
}
