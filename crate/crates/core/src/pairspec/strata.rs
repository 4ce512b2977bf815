use super::galois::GaloisData;
use super::PairError;
use crate::exactlin::linalg::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// An irreducible component of the intersection of the components in `support`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumId {
    pub support: Vec<usize>,
    pub index: usize,
}

/// Number of strata for each nonempty support set; a missing or zero entry means empty intersection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrataTable {
    pub entries: BTreeMap<Vec<usize>, usize>,
}

impl StrataTable {
    pub fn count(&self, support: &[usize]) -> usize {
        self.entries.get(support).copied().unwrap_or(0)
    }

    pub fn has(&self, support: &[usize]) -> bool {
        self.count(support) > 0
    }

    pub fn strata_of(&self, support: &[usize]) -> Vec<StratumId> {
        (0..self.count(support))
            .map(|index| StratumId {
                support: support.to_vec(),
                index,
            })
            .collect()
    }

    /// small ⊆ big as closed subsets.
    pub fn is_inside(&self, small: &StratumId, big: &StratumId) -> bool {
        big.support.iter().all(|i| small.support.contains(i))
            && (self.count(&big.support) == 1 || small.index == big.index)
    }

    pub fn all_strata(&self) -> Vec<StratumId> {
        self.entries
            .keys()
            .flat_map(|s| self.strata_of(s))
            .collect()
    }

    /// Strata containing no other stratum.
    pub fn minimal_strata(&self) -> Vec<StratumId> {
        let all = self.all_strata();
        all.iter()
            .filter(|c| !all.iter().any(|d| d != *c && self.is_inside(d, c)))
            .cloned()
            .collect()
    }

    pub fn act(p: &[usize], c: &StratumId) -> StratumId {
        let mut support: Vec<usize> = c.support.iter().map(|&i| p[i]).collect();
        support.sort();
        StratumId {
            support,
            index: c.index,
        }
    }

    pub fn check_invariant(&self, g: &GaloisData) -> Result<(), PairError> {
        for p in &g.generators {
            for (s, &c) in &self.entries {
                let mut t: Vec<usize> = s.iter().map(|&i| p[i]).collect();
                t.sort();
                if self.count(&t) != c {
                    return Err(PairError::Galois(format!(
                        "action does not preserve the strata over {s:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Element a + b√d of a quadratic field (d = 1 means ℚ itself with b unused).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadElt {
    pub a: Q,
    pub b: Q,
}

impl QuadElt {
    pub fn rational(a: Q) -> Self {
        QuadElt { a, b: Q::zero() }
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn mul(&self, o: &QuadElt, d: &Q) -> QuadElt {
        QuadElt {
            a: &self.a * &o.a + d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    fn sub(&self, o: &QuadElt) -> QuadElt {
        QuadElt {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    fn inv(&self, d: &Q) -> QuadElt {
        let n = &self.a * &self.a - d * &self.b * &self.b;
        QuadElt {
            a: &self.a / &n,
            b: -(&self.b / &n),
        }
    }
}

/// Rank over ℚ(√d) of linear forms with coefficients in that field.
pub fn quad_rank(rows: &[Vec<QuadElt>], d: i64) -> usize {
    let d = Q::from_integer(d.into());
    let mut m = rows.to_vec();
    let rows_n = m.len();
    if rows_n == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows_n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv(&d);
        for i in r + 1..rows_n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].mul(&inv, &d);
            for j in c..cols {
                let t = f.mul(&m[r][j], &d);
                m[i][j] = m[i][j].sub(&t);
            }
        }
        r += 1;
        if r == rows_n {
            break;
        }
    }
    r
}

pub fn one() -> QuadElt {
    QuadElt::rational(Q::one())
}
