use super::InvariantError;
use crate::exactlin::linalg::{q, zero_vec, QVec, Q, Z};
use crate::exactlin::{smith_normal_form, IntMatrix, SmithForm};
use crate::pairspec::{Ambient, PairModel};
use num_integer::Integer;
use num_traits::{One, Zero};

/// A finitely presented abelian group ℤ^N / (row span of `relations`).
#[derive(Clone, Debug)]
pub struct Lattice {
    pub relations: IntMatrix,
    pub snf: SmithForm,
}

impl Lattice {
    pub fn new(ncols: usize, rows: Vec<Vec<Z>>) -> Lattice {
        let relations = IntMatrix::from_rows(ncols, rows);
        let snf = smith_normal_form(&relations);
        Lattice { relations, snf }
    }

    pub fn ngens(&self) -> usize {
        self.relations.cols
    }

    pub fn rank(&self) -> usize {
        self.ngens() - self.snf.rank()
    }

    pub fn torsion(&self) -> Vec<Z> {
        self.snf.torsion()
    }

    pub fn torsion_order(&self) -> Z {
        self.torsion().iter().fold(Z::one(), |a, b| a * b)
    }

    fn transformed(&self, x: &[Q]) -> QVec {
        let v = &self.snf.v;
        (0..self.ngens())
            .map(|k| {
                x.iter().enumerate().fold(Q::zero(), |acc, (i, xi)| {
                    acc + xi * Q::from_integer(v.data[i][k].clone())
                })
            })
            .collect()
    }

    /// Coordinates in a basis of the free quotient.
    pub fn free(&self, x: &[Q]) -> QVec {
        self.transformed(x).split_off(self.snf.rank())
    }

    /// Whether an integral vector lies in the relation lattice.
    pub fn is_relation(&self, x: &[Q]) -> bool {
        let y = self.transformed(x);
        let r = self.snf.rank();
        y.iter().enumerate().all(|(k, yk)| {
            if !yk.is_integer() {
                return false;
            }
            if k < r {
                yk.to_integer().is_multiple_of(&self.snf.factors[k])
            } else {
                yk.is_zero()
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct PicPresentation {
    pub labels: Vec<String>,
    /// Number of leading generators that come from the ambient Picard group.
    pub n_ambient: usize,
    /// Γ-orbits, as index lists into the pair's generator set, in label order.
    pub orbits: Vec<Vec<usize>>,
    pub lattice: Lattice,
    /// Component-orbit relations, one row per Galois orbit of boundary components.
    pub component_orbits: Vec<Vec<usize>>,
}

impl PicPresentation {
    pub fn ngens(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn invariant_factors(&self) -> Vec<Z> {
        self.lattice.torsion()
    }

    pub fn torsion_order(&self) -> Z {
        self.lattice.torsion_order()
    }

    pub fn free(&self, x: &[Q]) -> QVec {
        self.lattice.free(x)
    }

    pub fn orbit_index(&self, k: usize) -> usize {
        self.n_ambient + k
    }

    /// The class of a Γ-orbit as a presentation vector.
    pub fn orbit_class(&self, k: usize) -> QVec {
        let mut v = zero_vec(self.ngens());
        v[self.orbit_index(k)] = Q::one();
        v
    }

    /// The same presentation with the listed generators set to zero.
    pub fn restricted(&self, killed: &[usize]) -> Lattice {
        let mut rows = self.lattice.relations.data.clone();
        for &i in killed {
            let mut r = vec![Z::zero(); self.ngens()];
            r[i] = Z::one();
            rows.push(r);
        }
        Lattice::new(self.ngens(), rows)
    }
}

fn ambient_labels(a: &Ambient) -> Vec<String> {
    match a {
        Ambient::Projective(_) => vec!["H".into()],
        Ambient::Toric { rays, .. } => (0..rays.len()).map(|i| format!("D_rho{i}")).collect(),
    }
}

/// Pic(X) of the ambient space alone.
pub fn ambient_lattice(a: &Ambient) -> Lattice {
    let g = a.pic_generators();
    Lattice::new(
        g,
        a.relations()
            .iter()
            .map(|r| r.iter().map(|&x| Z::from(x)).collect())
            .collect(),
    )
}

/// Picard presentation of a proper pair.
pub fn pic_presentation(pair: &PairModel) -> Result<PicPresentation, InvariantError> {
    if !pair.proper {
        return Err(InvariantError::NotProper);
    }
    Ok(pic_presentation_unchecked(pair))
}

/// Picard presentation without the properness precondition.
pub fn pic_presentation_unchecked(pair: &PairModel) -> PicPresentation {
    let na = pair.ambient.pic_generators();
    let orbits = pair.generator_orbits();
    let n = na + orbits.len();
    let mut labels = ambient_labels(&pair.ambient);
    for o in &orbits {
        let g = &pair.generators[o[0]];
        let w: Vec<String> = g.w.iter().map(|x| x.to_string()).collect();
        let suffix = if pair.strata.count(&g.stratum.support) > 1 {
            format!("@{}", g.stratum.index)
        } else {
            String::new()
        };
        labels.push(format!("E({}){suffix}", w.join(",")));
    }
    let mut rows: Vec<Vec<Z>> = Vec::new();
    for r in pair.ambient.relations() {
        let mut row = vec![Z::zero(); n];
        for (i, x) in r.iter().enumerate() {
            row[i] = Z::from(*x);
        }
        rows.push(row);
    }
    let component_orbits = pair.component_orbits();
    for co in &component_orbits {
        let mut row = vec![Z::zero(); n];
        for &i in co {
            for (j, c) in pair.components[i].class.iter().enumerate() {
                row[j] += Z::from(*c);
            }
        }
        for (k, o) in orbits.iter().enumerate() {
            let w = &pair.generators[o[0]].w;
            let s: u64 = co.iter().map(|&i| w[i]).sum();
            row[na + k] -= Z::from(s);
        }
        rows.push(row);
    }
    PicPresentation {
        labels,
        n_ambient: na,
        orbits,
        lattice: Lattice::new(n, rows),
        component_orbits,
    }
}

/// pr* of an ambient class: ambient classes keep their coordinates, generic representatives avoid all strata.
pub fn pullback_class(pres: &PicPresentation, class: &[Q]) -> QVec {
    let mut v = zero_vec(pres.ngens());
    for (i, c) in class.iter().enumerate() {
        v[i] = c.clone();
    }
    v
}

/// rank Pic(X) + #((Γ minus the minimal axis vectors)/G).
pub fn rank_formula(pair: &PairModel) -> usize {
    let d = pair.family.proper_weights();
    let orbits = pair.generator_orbits();
    let axis = orbits
        .iter()
        .filter(|o| {
            let w = &pair.generators[o[0]].w;
            let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0).collect();
            support.len() == 1 && d[support[0]] == Some(w[support[0]])
        })
        .count();
    pair.ambient.pic_rank() + orbits.len() - axis
}

/// Kernel of pr* on Pic(X)_ℚ is trivial.
pub fn pullback_injective(pres: &PicPresentation, ambient: &Ambient) -> bool {
    let g = ambient.pic_generators();
    let images: Vec<QVec> = (0..g)
        .map(|i| {
            let mut e = zero_vec(g);
            e[i] = q(1);
            pres.free(&pullback_class(pres, &e))
        })
        .collect();
    crate::exactlin::linalg::rank(&images) == ambient_lattice(ambient).rank()
}
