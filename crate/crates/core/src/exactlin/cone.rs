use super::linalg::{
    dot, factorial, nullspace, primitive_integer, q, rank, row_basis, solve_combination, to_q,
    zero_vec, QVec, Q, Z,
};
use super::lp::{feasible, maximize, LpResult};
use super::snf::{smith_normal_form, IntMatrix};
use super::ExactError;
use num_traits::{One, Signed, Zero};
use std::sync::OnceLock;

/// A rational value extended by the two infinities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(Q),
    PosInf,
}

impl Extended {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Extended::Finite(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integral {
    Finite(Q),
    Divergent,
}

#[derive(Clone, Debug)]
pub struct Facets {
    /// Inward normals of the facets, taken inside the linear span.
    pub normals: Vec<QVec>,
    /// Equations cutting out the linear span.
    pub equations: Vec<QVec>,
}

#[derive(Debug)]
pub struct RationalCone {
    dim: usize,
    gens: Vec<QVec>,
    facets: OnceLock<Facets>,
}

impl Clone for RationalCone {
    fn clone(&self) -> Self {
        RationalCone {
            dim: self.dim,
            gens: self.gens.clone(),
            facets: self.facets.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    pub indices: Vec<usize>,
    pub generators: Vec<QVec>,
    pub codim: usize,
}

impl RationalCone {
    /// Zero generators are dropped.
    pub fn new(dim: usize, gens: Vec<QVec>) -> Self {
        assert!(
            gens.iter().all(|g| g.len() == dim),
            "generator of wrong length"
        );
        let gens = gens
            .into_iter()
            .filter(|g| !g.iter().all(|x| x.is_zero()))
            .collect();
        RationalCone {
            dim,
            gens,
            facets: OnceLock::new(),
        }
    }

    pub fn from_i64(dim: usize, gens: &[Vec<i64>]) -> Self {
        Self::new(
            dim,
            gens.iter()
                .map(|g| g.iter().map(|&x| q(x)).collect())
                .collect(),
        )
    }

    pub fn orthant(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim).map(|i| super::linalg::unit_vec(dim, i)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QVec] {
        &self.gens
    }

    pub fn span_dim(&self) -> usize {
        rank(&self.gens)
    }

    pub fn facets(&self) -> &Facets {
        self.facets.get_or_init(|| {
            let (normals, equations) = dual_parts(self.dim, &self.gens);
            Facets { normals, equations }
        })
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let f = self.facets();
        f.equations.iter().all(|e| dot(e, x).is_zero())
            && f.normals.iter().all(|n| !dot(n, x).is_negative())
    }

    /// Nonnegative coefficients expressing x in the generators, if any.
    pub fn decompose(&self, x: &[Q]) -> Option<QVec> {
        if self.gens.is_empty() {
            return x.iter().all(|v| v.is_zero()).then(Vec::new);
        }
        feasible(&columns_as_rows(self.dim, &self.gens), x)
    }
}

fn columns_as_rows(dim: usize, cols: &[QVec]) -> Vec<QVec> {
    (0..dim)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

fn normalize(v: &[Q]) -> QVec {
    to_q(&primitive_integer(v))
}

/// Extreme rays of the pointed cone {c : a_i . c >= 0}, where the rows a_i span k-space.
fn double_description(a: &[QVec], k: usize) -> Vec<QVec> {
    if k == 0 {
        return vec![];
    }
    let mut basis: Vec<usize> = Vec::new();
    let mut chosen: Vec<QVec> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut trial = chosen.clone();
        trial.push(row.clone());
        if rank(&trial) == trial.len() {
            chosen = trial;
            basis.push(i);
            if basis.len() == k {
                break;
            }
        }
    }
    assert_eq!(basis.len(), k, "constraint rows must span");
    let cols = columns_as_rows(k, &chosen);
    let mut rays: Vec<QVec> = (0..k)
        .map(|j| {
            let e = super::linalg::unit_vec(k, j);
            normalize(&solve_combination(&cols, &e).expect("invertible basis"))
        })
        .collect();
    let mut processed = basis.clone();
    for (i, row) in a.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(row, r)).collect();
        let mut next: Vec<QVec> = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (j, v) in vals.iter().enumerate() {
            if v.is_negative() {
                neg.push(j);
            } else {
                next.push(rays[j].clone());
                if v.is_positive() {
                    pos.push(j);
                }
            }
        }
        if !neg.is_empty() {
            let tight: Vec<Vec<usize>> = rays
                .iter()
                .map(|r| {
                    processed
                        .iter()
                        .copied()
                        .filter(|&p| dot(&a[p], r).is_zero())
                        .collect()
                })
                .collect();
            for &p in &pos {
                for &n in &neg {
                    let common: Vec<QVec> = tight[p]
                        .iter()
                        .filter(|x| tight[n].contains(x))
                        .map(|&x| a[x].clone())
                        .collect();
                    if rank(&common) + 2 != k {
                        continue;
                    }
                    let r: QVec = rays[n]
                        .iter()
                        .zip(&rays[p])
                        .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                        .collect();
                    let r = normalize(&r);
                    if !next.contains(&r) {
                        next.push(r);
                    }
                }
            }
        }
        rays = next;
        processed.push(i);
    }
    rays
}

/// Pointed generators of the dual inside the span, and a basis of the orthogonal complement of the span.
fn dual_parts(dim: usize, gens: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let equations: Vec<QVec> = nullspace(gens, dim).iter().map(|v| normalize(v)).collect();
    let w = row_basis(gens);
    let k = w.len();
    let a: Vec<QVec> = gens
        .iter()
        .map(|g| w.iter().map(|wi| dot(wi, g)).collect())
        .collect();
    let rays = double_description(&a, k);
    let normals = rays
        .iter()
        .map(|c| {
            let mut y = zero_vec(dim);
            for (ci, wi) in c.iter().zip(&w) {
                for (yj, wj) in y.iter_mut().zip(wi) {
                    *yj += ci * wj;
                }
            }
            normalize(&y)
        })
        .collect();
    (normals, equations)
}

pub fn dual_cone(cone: &RationalCone) -> RationalCone {
    let f = cone.facets();
    let mut gens = f.normals.clone();
    for e in &f.equations {
        gens.push(e.clone());
        gens.push(e.iter().map(|x| -x).collect());
    }
    RationalCone::new(cone.dim, gens)
}

pub fn is_strongly_convex(cone: &RationalCone) -> bool {
    let n = cone.gens.len();
    if n == 0 {
        return true;
    }
    let mut rows = columns_as_rows(cone.dim, &cone.gens);
    rows.push(vec![Q::one(); n]);
    let mut rhs = zero_vec(cone.dim);
    rhs.push(Q::one());
    feasible(&rows, &rhs).is_none()
}

/// Extreme rays of a pointed cone as primitive integer vectors; None if the cone contains a line.
pub fn extreme_rays(cone: &RationalCone) -> Option<Vec<QVec>> {
    if !is_strongly_convex(cone) {
        return None;
    }
    let d = dual_cone(cone);
    Some(d.facets().normals.clone())
}

/// inf { t : base + t * direction in cone }.
pub fn min_parameter_in_cone(cone: &RationalCone, base: &[Q], direction: &[Q]) -> Extended {
    let n = cone.gens.len();
    // sum lambda_j g_j - t+ d + t- d = base
    let rows: Vec<QVec> = (0..cone.dim)
        .map(|i| {
            let mut r: QVec = cone.gens.iter().map(|g| g[i].clone()).collect();
            r.push(-direction[i].clone());
            r.push(direction[i].clone());
            r
        })
        .collect();
    let mut c = zero_vec(n + 2);
    c[n] = -Q::one();
    c[n + 1] = Q::one();
    match maximize(&c, &rows, base) {
        LpResult::Optimal { value, .. } => Extended::Finite(-value),
        LpResult::Unbounded => Extended::NegInf,
        LpResult::Infeasible => Extended::PosInf,
    }
}

/// Smallest face containing `point`.
pub fn minimal_face(cone: &RationalCone, point: &[Q]) -> Result<Face, ExactError> {
    if cone.decompose(point).is_none() {
        return Err(ExactError::NotInCone);
    }
    let n = cone.gens.len();
    let r = cone.dim;
    let indices: Vec<usize> = if n == 0 {
        vec![]
    } else {
        // variables: lambda (n), s, y (n), w (n), u (n)
        let nv = 4 * n + 1;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..r {
            let mut row = zero_vec(nv);
            for j in 0..n {
                row[j] = cone.gens[j][i].clone();
            }
            row[n] = -point[i].clone();
            rows.push(row);
            rhs.push(Q::zero());
        }
        for j in 0..n {
            let mut row = zero_vec(nv);
            row[j] = Q::one();
            row[n + 1 + j] = -Q::one();
            row[2 * n + 1 + j] = -Q::one();
            rows.push(row);
            rhs.push(Q::zero());
            let mut row = zero_vec(nv);
            row[n + 1 + j] = Q::one();
            row[3 * n + 1 + j] = Q::one();
            rows.push(row);
            rhs.push(Q::one());
        }
        let mut c = zero_vec(nv);
        for cj in c.iter_mut().skip(n + 1).take(n) {
            *cj = Q::one();
        }
        match maximize(&c, &rows, &rhs) {
            LpResult::Optimal { x, .. } => (0..n).filter(|&j| x[n + 1 + j].is_one()).collect(),
            _ => unreachable!("face program is bounded and feasible"),
        }
    };
    let generators: Vec<QVec> = indices.iter().map(|&j| cone.gens[j].clone()).collect();
    let codim = r - rank(&generators);
    Ok(Face {
        indices,
        generators,
        codim,
    })
}

/// Integer basis change placing the saturated lattice of the span in the leading coordinates.
fn span_lattice(dim: usize, gens: &[QVec]) -> (usize, IntMatrix) {
    let basis: Vec<Vec<Z>> = row_basis(gens)
        .iter()
        .map(|w| primitive_integer(w))
        .collect();
    let k = basis.len();
    if k == 0 {
        return (0, IntMatrix::identity(dim));
    }
    let s = smith_normal_form(&IntMatrix::from_rows(dim, basis));
    (k, s.v)
}

fn lattice_coords(x: &[Q], k: usize, v: &IntMatrix) -> QVec {
    (0..k)
        .map(|j| {
            x.iter().enumerate().fold(Q::zero(), |acc, (i, xi)| {
                acc + xi * Q::from_integer(v.data[i][j].clone())
            })
        })
        .collect()
}

/// Pulling triangulation of a pointed cone given by its extreme rays; returns index sets.
pub fn triangulate(dim: usize, rays: &[QVec]) -> Vec<Vec<usize>> {
    let k = rank(rays);
    if rays.len() == k {
        return vec![(0..rays.len()).collect()];
    }
    let sub = RationalCone::new(dim, rays.to_vec());
    let v = &rays[0];
    let mut out = Vec::new();
    for f in &sub.facets().normals {
        if !dot(f, v).is_positive() {
            continue;
        }
        let face: Vec<usize> = (0..rays.len())
            .filter(|&i| dot(f, &rays[i]).is_zero())
            .collect();
        let face_rays: Vec<QVec> = face.iter().map(|&i| rays[i].clone()).collect();
        for simplex in triangulate(dim, &face_rays) {
            let mut s = vec![0];
            s.extend(simplex.iter().map(|&i| face[i]));
            out.push(s);
        }
    }
    out
}

/// Integral of exp(-<L,x>) over the cone, normalized by the saturated lattice of its span.
pub fn exponential_cone_integral(cone: &RationalCone, l: &[Q]) -> Integral {
    let Some(rays) = extreme_rays(cone) else {
        return Integral::Divergent;
    };
    if rays.iter().any(|r| !dot(l, r).is_positive()) {
        return Integral::Divergent;
    }
    if rays.is_empty() {
        return Integral::Finite(Q::one());
    }
    let (k, v) = span_lattice(cone.dim, &rays);
    let mut total = Q::zero();
    for simplex in triangulate(cone.dim, &rays) {
        let m: Vec<QVec> = simplex
            .iter()
            .map(|&i| lattice_coords(&rays[i], k, &v))
            .collect();
        let d = super::linalg::det(&m).abs();
        let denom = simplex
            .iter()
            .fold(Q::one(), |acc, &i| acc * dot(l, &rays[i]));
        total += d / denom;
    }
    Integral::Finite(total)
}

/// Volume of the slice {<L,x> = 1}, in the measure whose cone over it is the lattice measure.
pub fn slice_volume(cone: &RationalCone, l: &[Q]) -> Result<Q, ExactError> {
    let k = cone.span_dim();
    if k == 0 {
        return Err(ExactError::UnboundedSlice);
    }
    match exponential_cone_integral(cone, l) {
        Integral::Finite(v) => Ok(v / Q::from_integer(factorial(k as u64 - 1))),
        Integral::Divergent => Err(ExactError::UnboundedSlice),
    }
}
