use super::linalg::Z;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Integer matrix stored row-major, arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Z>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![Z::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Z::one();
        }
        m
    }

    pub fn from_i64(cols: usize, rows: &[Vec<i64>]) -> Self {
        let data: Vec<Vec<Z>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Z::from(x)).collect())
            .collect();
        IntMatrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<Z>>) -> Self {
        assert!(
            data.iter().all(|r| r.len() == cols),
            "rectangular matrix required"
        );
        IntMatrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += t;
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero diagonal entries d1 | d2 | ... (positive).
    pub factors: Vec<Z>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diag: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<Z> {
        self.factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

fn swap_rows(a: &mut IntMatrix, i: usize, j: usize) {
    a.data.swap(i, j);
}

fn swap_cols(a: &mut IntMatrix, i: usize, j: usize) {
    for r in a.data.iter_mut() {
        r.swap(i, j);
    }
}

// row_i += c * row_j
fn add_row(a: &mut IntMatrix, i: usize, j: usize, c: &Z) {
    for k in 0..a.cols {
        let t = c * &a.data[j][k];
        a.data[i][k] += t;
    }
}

// col_i += c * col_j
fn add_col(a: &mut IntMatrix, i: usize, j: usize, c: &Z) {
    for r in a.data.iter_mut() {
        let t = c * &r[j];
        r[i] += t;
    }
}

fn negate_row(a: &mut IntMatrix, i: usize) {
    for x in a.data[i].iter_mut() {
        *x = -x.clone();
    }
}

/// Smith normal form with unimodular transforms, U * A * V = D.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d.data[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| d.data[i][j].abs() < d.data[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d.data[i][t].is_zero() {
                    continue;
                }
                let qt = d.data[i][t].div_floor(&d.data[t][t]);
                let c = -qt;
                add_row(&mut d, i, t, &c);
                add_row(&mut u, i, t, &c);
                if !d.data[i][t].is_zero() {
                    swap_rows(&mut d, t, i);
                    swap_rows(&mut u, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d.data[t][j].is_zero() {
                    continue;
                }
                let qt = d.data[t][j].div_floor(&d.data[t][t]);
                let c = -qt;
                add_col(&mut d, j, t, &c);
                add_col(&mut v, j, t, &c);
                if !d.data[t][j].is_zero() {
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let mut fix = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !d.data[i][j].is_multiple_of(&d.data[t][t]) {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    let one = Z::one();
                    add_row(&mut d, t, i, &one);
                    add_row(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d.data[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let factors = (0..m.min(n))
        .map(|i| d.data[i][i].clone())
        .filter(|x| !x.is_zero())
        .collect();
    SmithForm {
        factors,
        u,
        v,
        diag: d,
    }
}
