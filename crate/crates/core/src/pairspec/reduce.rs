use super::strata::StrataTable;
use super::Generator;
use crate::exactlin::linalg::{q, zero_vec, QVec, Q};
use crate::exactlin::lp::{feasible, maximize, LpResult};
use num_traits::{One, Zero};

fn to_qvec(w: &[u64]) -> QVec {
    w.iter().map(|&x| q(x as i64)).collect()
}

/// Largest eps with point - eps·1 in conv(pts) + R≥0^n; zero means boundary.
fn interior_depth(point: &[Q], pts: &[QVec]) -> Q {
    let n = point.len();
    let k = pts.len();
    // variables: lambda (k), slack s (n), eps
    let nv = k + n + 1;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let mut r = zero_vec(nv);
        for (j, p) in pts.iter().enumerate() {
            r[j] = p[i].clone();
        }
        r[k + i] = Q::one();
        r[k + n] = Q::one();
        rows.push(r);
        rhs.push(point[i].clone());
    }
    let mut r = zero_vec(nv);
    for x in r.iter_mut().take(k) {
        *x = Q::one();
    }
    rows.push(r);
    rhs.push(Q::one());
    let mut c = zero_vec(nv);
    c[k + n] = Q::one();
    match maximize(&c, &rows, &rhs) {
        LpResult::Optimal { value, .. } => value,
        _ => Q::zero(),
    }
}

fn in_upper_hull(point: &[Q], pts: &[QVec]) -> bool {
    if pts.is_empty() {
        return false;
    }
    let n = point.len();
    let k = pts.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let mut r = zero_vec(k + n);
        for (j, p) in pts.iter().enumerate() {
            r[j] = p[i].clone();
        }
        r[k + i] = Q::one();
        rows.push(r);
        rhs.push(point[i].clone());
    }
    let mut r = zero_vec(k + n);
    for x in r.iter_mut().take(k) {
        *x = Q::one();
    }
    rows.push(r);
    rhs.push(Q::one());
    feasible(&rows, &rhs).is_some()
}

/// Generators on the boundary of, and at vertices of, conv(Γ_c) + R≥0^n for the minimal strata c.
pub fn reduce_generators(
    gens: &[Generator],
    strata: &StrataTable,
) -> (Vec<Generator>, Vec<Generator>) {
    let minimal = strata.minimal_strata();
    let mut boundary = vec![false; gens.len()];
    let mut vertex = vec![false; gens.len()];
    for c in &minimal {
        let members: Vec<usize> = (0..gens.len())
            .filter(|&j| strata.is_inside(c, &gens[j].stratum))
            .collect();
        let mut pts: Vec<QVec> = members.iter().map(|&j| to_qvec(&gens[j].w)).collect();
        pts.dedup();
        for &j in &members {
            let p = to_qvec(&gens[j].w);
            if interior_depth(&p, &pts).is_zero() {
                boundary[j] = true;
                let others: Vec<QVec> = pts.iter().filter(|x| **x != p).cloned().collect();
                if !in_upper_hull(&p, &others) {
                    vertex[j] = true;
                }
            }
        }
    }
    let pick = |flags: &[bool]| {
        gens.iter()
            .zip(flags)
            .filter(|(_, &f)| f)
            .map(|(g, _)| g.clone())
            .collect()
    };
    (pick(&boundary), pick(&vertex))
}

#[cfg(test)]
mod tests {
    use super::super::strata::StratumId;
    use super::*;

    fn table(n: usize) -> StrataTable {
        let mut t = StrataTable::default();
        for mask in 1..(1usize << n) {
            t.entries
                .insert((0..n).filter(|i| mask >> i & 1 == 1).collect(), 1);
        }
        t
    }

    fn gen(w: &[u64]) -> Generator {
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0).collect();
        Generator {
            w: w.to_vec(),
            stratum: StratumId { support, index: 0 },
        }
    }

    fn ws(g: &[Generator]) -> Vec<Vec<u64>> {
        let mut v: Vec<Vec<u64>> = g.iter().map(|x| x.w.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn weak_campana_two_two() {
        let gens: Vec<Generator> = [[2, 0], [0, 2], [1, 1], [3, 0], [0, 3], [2, 1], [1, 2]]
            .iter()
            .map(|w| gen(w))
            .collect();
        let (b, v) = reduce_generators(&gens, &table(2));
        assert_eq!(
            ws(&b),
            vec![vec![0, 2], vec![0, 3], vec![1, 1], vec![2, 0], vec![3, 0]]
        );
        assert_eq!(ws(&v), vec![vec![0, 2], vec![2, 0]]);
        let (b2, v2) = reduce_generators(&b, &table(2));
        assert_eq!(ws(&b2), ws(&b));
        assert_eq!(ws(&v2), ws(&v));
    }

    #[test]
    fn single_divisor_campana() {
        let gens = vec![gen(&[2]), gen(&[3])];
        let (b, v) = reduce_generators(&gens, &table(1));
        assert_eq!(ws(&b), vec![vec![2]]);
        assert_eq!(ws(&v), vec![vec![2]]);
    }

    #[test]
    fn empty_passes_through() {
        let (b, v) = reduce_generators(&[], &table(2));
        assert!(b.is_empty() && v.is_empty());
    }
}
