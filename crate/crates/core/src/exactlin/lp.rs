//! Exact two-phase simplex on standard-form problems, Bland's pivoting rule.

use super::linalg::{QVec, Q};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { value: Q, x: QVec },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    // rows: constraints, last column rhs
    t: Vec<QVec>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximize obj over columns in `allowed`; obj indexed by column.
    /// Returns false if unbounded.
    fn optimize(&mut self, obj: &[Q], allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs = self.ncols;
        loop {
            // reduced cost of column j: obj_j - sum_i obj_{basis_i} t_ij
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !obj[b].is_zero() && !self.t[i][j].is_zero() {
                        rc -= &obj[b] * &self.t[i][j];
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = &self.t[i][rhs] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

/// maximize c.x subject to A x = b, x >= 0.
pub fn maximize(c: &[Q], a: &[QVec], b: &[Q]) -> LpResult {
    let n = c.len();
    let m = a.len();
    assert!(a.iter().all(|r| r.len() == n));
    assert_eq!(b.len(), m);
    let total = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: QVec = a[i]
            .iter()
            .map(|x| if neg { -x.clone() } else { x.clone() })
            .collect();
        for k in 0..m {
            row.push(if k == i { Q::one() } else { Q::zero() });
        }
        row.push(if neg { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..total).collect(),
        ncols: total,
    };
    // phase one: maximize -sum(artificials)
    let mut obj1 = vec![Q::zero(); total];
    for o in obj1.iter_mut().skip(n) {
        *o = -Q::one();
    }
    tab.optimize(&obj1, &|_| true);
    let infeas: Q = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .fold(Q::zero(), |acc, (i, _)| acc + &tab.t[i][total]);
    if infeas.is_positive() {
        return LpResult::Infeasible;
    }
    // drive artificials out of the basis
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    let mut obj2 = c.to_vec();
    obj2.resize(total, Q::zero());
    if !tab.optimize(&obj2, &|j| j < n) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.t[i][total].clone();
        }
    }
    let value = super::linalg::dot(c, &x);
    LpResult::Optimal { value, x }
}

/// Is there x >= 0 with A x = b?
pub fn feasible(a: &[QVec], b: &[Q]) -> Option<QVec> {
    let n = a.first().map_or(0, |r| r.len());
    match maximize(&vec![Q::zero(); n], a, b) {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    }
}
