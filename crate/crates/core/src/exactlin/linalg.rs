use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Z = BigInt;
pub type Q = BigRational;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [QVec]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[QVec]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = vectors.to_vec();
    rref(&mut m).len()
}

/// Basis of {x : M x = 0} where M is given by rows.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    if rows.is_empty() {
        return (0..ncols).map(|i| unit_vec(ncols, i)).collect();
    }
    let mut m = rows.to_vec();
    let piv = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(ncols);
            v[f] = Q::one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// A basis of the row span (reduced rows).
pub fn row_basis(vectors: &[QVec]) -> Vec<QVec> {
    if vectors.is_empty() {
        return vec![];
    }
    let mut m = vectors.to_vec();
    let k = rref(&mut m).len();
    m.truncate(k);
    m
}

/// Solve sum_j coef_j * cols[j] = target; returns one solution if consistent.
pub fn solve_combination(cols: &[QVec], target: &[Q]) -> Option<QVec> {
    let n = target.len();
    let k = cols.len();
    let mut aug: Vec<QVec> = (0..n)
        .map(|i| {
            let mut row: QVec = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&k) {
        return None;
    }
    let mut x = zero_vec(k);
    for (r, &pc) in piv.iter().enumerate() {
        x[pc] = aug[r][k].clone();
    }
    Some(x)
}

pub fn det(m: &[QVec]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Scale a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Q]) -> Vec<Z> {
    let mut l = Z::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<Z> = v
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let mut g = Z::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_q(v: &[Z]) -> QVec {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn factorial(n: u64) -> Z {
    (1..=n).fold(Z::one(), |acc, k| acc * Z::from(k))
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}
