use super::canonical::canonical_class;
use super::pic::{pic_presentation, pullback_class, Lattice, PicPresentation};
use super::InvariantError;
use crate::exactlin::cone::{dual_cone, exponential_cone_integral, slice_volume};
use crate::exactlin::linalg::{add, factorial, q, scale, zero_vec, QVec, Q};
use crate::exactlin::lp::{maximize, LpResult};
use crate::exactlin::{
    is_strongly_convex, min_parameter_in_cone, minimal_face, Extended, Integral, RationalCone,
};
use crate::pairspec::{Ambient, PairModel};
use num_traits::{One, Signed, Zero};

/// An effective generator: a prime divisor class, possibly moving in its linear system.
#[derive(Clone, Debug)]
pub struct EffGen {
    pub label: String,
    /// Index of the generator in the presentation it lives in.
    pub slot: usize,
    pub movable: bool,
}

/// A polyhedral cone given by labelled effective generators in free coordinates.
#[derive(Clone, Debug)]
pub struct EffCone {
    pub gens: Vec<EffGen>,
    pub free: Vec<QVec>,
    pub cone: RationalCone,
    /// cone generator index → `gens` index (zero classes are dropped by the cone).
    pub cone_index: Vec<usize>,
}

impl EffCone {
    pub fn new(dim: usize, gens: Vec<EffGen>, free: Vec<QVec>) -> EffCone {
        let cone_index: Vec<usize> = (0..free.len())
            .filter(|&j| free[j].iter().any(|x| !x.is_zero()))
            .collect();
        let cone = RationalCone::new(dim, cone_index.iter().map(|&j| free[j].clone()).collect());
        EffCone {
            gens,
            free,
            cone,
            cone_index,
        }
    }

    pub fn face_labels(&self, indices: &[usize]) -> Vec<String> {
        indices
            .iter()
            .map(|&i| self.gens[self.cone_index[i]].label.clone())
            .collect()
    }
}

/// Eff(X,M): Γ-orbit classes and the ambient effective generators off the boundary.
pub fn effective_cone(pres: &PicPresentation, pair: &PairModel) -> EffCone {
    let mut gens = Vec::new();
    let boundary_rays: Vec<usize> = pair.divisors.iter().filter_map(|d| d.ray).collect();
    let movable = pair.ambient.movable_generators();
    for i in 0..pres.n_ambient {
        if boundary_rays.contains(&i) {
            continue;
        }
        gens.push(EffGen {
            label: pres.labels[i].clone(),
            slot: i,
            movable: movable[i],
        });
    }
    for k in 0..pres.orbits.len() {
        let slot = pres.orbit_index(k);
        gens.push(EffGen {
            label: pres.labels[slot].clone(),
            slot,
            movable: false,
        });
    }
    let free = gens
        .iter()
        .map(|g| pres.free(&unit(pres.ngens(), g.slot)))
        .collect();
    EffCone::new(pres.rank(), gens, free)
}

/// Eff(X) of the ambient space.
pub fn ambient_effective_cone(ambient: &Ambient, lattice: &Lattice) -> EffCone {
    let movable = ambient.movable_generators();
    let labels: Vec<String> = match ambient {
        Ambient::Projective(_) => vec!["H".into()],
        Ambient::Toric { rays, .. } => (0..rays.len()).map(|i| format!("D_rho{i}")).collect(),
    };
    let gens: Vec<EffGen> = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| EffGen {
            label,
            slot: i,
            movable: movable[i],
        })
        .collect();
    let free = gens
        .iter()
        .map(|g| lattice.free(&unit(lattice.ngens(), g.slot)))
        .collect();
    EffCone::new(lattice.rank(), gens, free)
}

pub(crate) fn unit(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

/// inf { t : t·L + K ∈ Eff }.
pub fn fujita_in_cone(eff: &EffCone, k: &[Q], l: &[Q]) -> Result<Q, InvariantError> {
    match min_parameter_in_cone(&eff.cone, k, l) {
        Extended::Finite(a) => Ok(a),
        Extended::NegInf => Err(InvariantError::Unbounded),
        Extended::PosInf => Err(InvariantError::Infeasible),
    }
}

/// Representative polytope {λ ≥ 0 : Σ λ_g [g] = target}: per-generator ranges and one point.
pub fn representative_ranges(
    free: &[QVec],
    target: &[Q],
) -> Result<(Vec<(Q, Q)>, QVec), InvariantError> {
    let n = free.len();
    let rows: Vec<QVec> = (0..target.len())
        .map(|i| free.iter().map(|g| g[i].clone()).collect())
        .collect();
    let mut ranges = Vec::with_capacity(n);
    let mut point = None;
    for j in 0..n {
        let mut c = zero_vec(n);
        c[j] = Q::one();
        let hi = match maximize(&c, &rows, target) {
            LpResult::Optimal { value, x } => {
                point.get_or_insert(x);
                value
            }
            LpResult::Infeasible => return Err(InvariantError::Infeasible),
            LpResult::Unbounded => return Err(InvariantError::Unbounded),
        };
        c[j] = -Q::one();
        let lo = match maximize(&c, &rows, target) {
            LpResult::Optimal { value, .. } => -value,
            _ => return Err(InvariantError::Infeasible),
        };
        ranges.push((lo, hi));
    }
    let point = match point {
        Some(p) => p,
        None if target.iter().all(|x| x.is_zero()) => vec![],
        None => return Err(InvariantError::Infeasible),
    };
    Ok((ranges, point))
}

/// Whether `target` has exactly one effective representative in the generators of `eff`.
pub fn rigid_in_cone(eff: &EffCone, target: &[Q]) -> Result<(bool, QVec), InvariantError> {
    let (ranges, point) = representative_ranges(&eff.free, target)?;
    let unique = ranges.iter().all(|(lo, hi)| lo == hi);
    let fixed = eff
        .gens
        .iter()
        .zip(&ranges)
        .all(|(g, (_, hi))| !g.movable || hi.is_zero());
    Ok((unique && fixed, point))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub a_log: Q,
    pub b_base: usize,
    /// Γ-orbits counted by the correction term.
    pub i_set: Vec<String>,
    pub rigid_log: bool,
    /// Whether the minimal face on X lies in the cone of boundary classes.
    pub face_in_boundary: bool,
    pub correction: Option<super::campana::CorrectionSets>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointReport {
    pub a: Q,
    pub adjoint: QVec,
    pub adjoint_free: QVec,
    pub face_labels: Vec<String>,
    pub b: usize,
    pub rigid: bool,
    /// Γ-orbit labels surviving in M°.
    pub restricted_labels: Vec<String>,
    pub alpha: Option<Q>,
    pub alpha_peyre: Option<Q>,
    pub pic_rank: usize,
    pub invariant_factors: Vec<i64>,
    pub strongly_convex: bool,
    pub decomposition: Option<Decomposition>,
}

impl AdjointReport {
    pub fn model(&self) -> String {
        format!("c*B^({})*(log B)^{}", self.a, self.b as i64 - 1)
    }
}

/// Core invariants of (X,M) for a class L on X.
pub struct PairInvariants {
    pub pres: PicPresentation,
    pub canonical: QVec,
    pub l: QVec,
    pub eff: EffCone,
}

impl PairInvariants {
    pub fn new(pair: &PairModel, l: &[Q]) -> Result<PairInvariants, InvariantError> {
        let pres = pic_presentation(pair)?;
        let canonical = canonical_class(&pres, pair)?;
        let l = pullback_class(&pres, l);
        let eff = effective_cone(&pres, pair);
        Ok(PairInvariants {
            pres,
            canonical,
            l,
            eff,
        })
    }

    pub fn fujita(&self) -> Result<Q, InvariantError> {
        fujita_in_cone(
            &self.eff,
            &self.pres.free(&self.canonical),
            &self.pres.free(&self.l),
        )
    }

    pub fn adjoint(&self, a: &Q) -> QVec {
        add(&scale(a, &self.l), &self.canonical)
    }

    /// b and the labels of the minimal face containing the adjoint class.
    pub fn b_invariant(&self, a: &Q) -> Result<(usize, Vec<usize>), InvariantError> {
        let adj = self.pres.free(&self.adjoint(a));
        let face = minimal_face(&self.eff.cone, &adj).map_err(|_| {
            InvariantError::Inconsistent("adjoint class outside the effective cone".into())
        })?;
        Ok((face.codim, face.indices))
    }

    pub fn rigid(&self, a: &Q) -> Result<(bool, QVec), InvariantError> {
        rigid_in_cone(&self.eff, &self.pres.free(&self.adjoint(a)))
    }

    /// α and α_Peyre on (X°,M°), dropping the generators in the support of the rigid representative.
    pub fn alpha(
        &self,
        a: &Q,
        b: usize,
        representative: &[Q],
    ) -> Result<(Q, Q, Vec<String>), InvariantError> {
        let killed: Vec<usize> = self
            .eff
            .gens
            .iter()
            .zip(representative)
            .filter(|(_, x)| x.is_positive())
            .map(|(g, _)| g.slot)
            .collect();
        let lattice = self.pres.restricted(&killed);
        let kept: Vec<EffGen> = self
            .eff
            .gens
            .iter()
            .filter(|g| !killed.contains(&g.slot))
            .cloned()
            .collect();
        let free: Vec<QVec> = kept
            .iter()
            .map(|g| lattice.free(&unit(self.pres.ngens(), g.slot)))
            .collect();
        let labels = kept
            .iter()
            .filter(|g| g.slot >= self.pres.n_ambient)
            .map(|g| g.label.clone())
            .collect();
        let eff = EffCone::new(lattice.rank(), kept, free);
        if lattice.rank() != b {
            return Err(InvariantError::Inconsistent(format!(
                "rank of Pic(X°,M°) is {} but b = {b}",
                lattice.rank()
            )));
        }
        let l = lattice.free(&self.l);
        let dual = dual_cone(&eff.cone);
        let integral = match exponential_cone_integral(&dual, &l) {
            Integral::Finite(v) => v,
            Integral::Divergent => return Err(InvariantError::Divergent),
        };
        let tors = Q::from_integer(lattice.torsion_order());
        let alpha = integral / &tors;
        let slice = slice_volume(&dual, &l).map_err(|_| InvariantError::Divergent)?;
        let alpha_peyre = slice / (a * tors);
        Ok((alpha, alpha_peyre, labels))
    }
}

/// a, b, rigidity, α and the quasi-Campana cross-checks for (X,M) and L.
pub fn predict(pair: &PairModel, l: &[Q]) -> Result<AdjointReport, InvariantError> {
    let inv = PairInvariants::new(pair, l)?;
    let strongly_convex = is_strongly_convex(&inv.eff.cone);
    let a = inv.fujita()?;
    let (b, face) = inv.b_invariant(&a)?;
    let (rigid, representative) = if a.is_positive() {
        inv.rigid(&a)?
    } else {
        (false, vec![])
    };
    let (alpha, alpha_peyre, restricted_labels) = if rigid {
        let (x, y, labels) = inv.alpha(&a, b, &representative)?;
        if x != &a * Q::from_integer(factorial(b as u64 - 1)) * &y {
            return Err(InvariantError::Inconsistent("alpha identity fails".into()));
        }
        (Some(x), Some(y), labels)
    } else {
        (None, None, vec![])
    };
    let decomposition = super::campana::decompose(pair, &inv, l, &a, b, rigid)?;
    Ok(AdjointReport {
        adjoint: inv.adjoint(&a),
        adjoint_free: inv.pres.free(&inv.adjoint(&a)),
        face_labels: inv.eff.face_labels(&face),
        a,
        b,
        rigid,
        restricted_labels,
        alpha,
        alpha_peyre,
        pic_rank: inv.pres.rank(),
        invariant_factors: inv
            .pres
            .invariant_factors()
            .iter()
            .map(|z| i64::try_from(z).unwrap_or(i64::MAX))
            .collect(),
        strongly_convex,
        decomposition,
    })
}

/// predict with the pair's configured L.
pub fn predict_default(pair: &PairModel) -> Result<AdjointReport, InvariantError> {
    let l: QVec = pair.l_class.iter().map(|&x| q(x)).collect();
    predict(pair, &l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::linalg::qf;
    use crate::pairspec::{build_pair, ConfigDocument};

    fn pair(s: &str) -> PairModel {
        build_pair(&ConfigDocument::from_json(s).unwrap()).unwrap()
    }

    fn ab(r: &AdjointReport) -> (Q, usize) {
        (r.a.clone(), r.b)
    }

    #[test]
    fn darmon_line() {
        let p = pair(
            r#"{"ambient":{"projective":2},"divisors":[{"name":"a","form":"x0"},{"name":"b","form":"x1"}],"family":{"kind":"darmon","m":[2]}}"#,
        );
        let r = predict(&p, &[q(1)]).unwrap();
        assert_eq!(ab(&r), (q(1), 1));
        assert!(r.rigid);
        assert_eq!(r.alpha, Some(qf(1, 4)));
        assert_eq!(r.invariant_factors, vec![2]);
    }

    #[test]
    fn gaussian_norm_form() {
        let p = pair(
            r#"{"ambient":{"projective":2},"divisors":[{"name":"q","form":"x0^2 + x1^2","splitting":{"quadratic":-1}}],"family":{"kind":"weak_campana","m":[2]}}"#,
        );
        assert_eq!(p.generators.len(), 4);
        let r = predict(&p, &[q(2)]).unwrap();
        assert_eq!(ab(&r), (qf(1, 2), 1));
        assert!(r.rigid);
        assert_eq!(r.alpha, Some(qf(1, 4)));
        assert_eq!(r.alpha_peyre, Some(qf(1, 2)));
    }

    #[test]
    fn fermat_pair() {
        let p = pair(
            r#"{"ambient":{"projective":2},"divisors":[{"name":"a","form":"x0"},{"name":"b","form":"x1"},{"name":"c","form":"x0 - x1"}],"family":{"kind":"darmon","m":[2]}}"#,
        );
        let r = predict(&p, &[q(1)]).unwrap();
        assert_eq!(ab(&r), (qf(1, 2), 1));
    }

    #[test]
    fn classical_plane() {
        let p = pair(
            r#"{"ambient":{"projective":3},"divisors":[{"name":"a","form":"x0"}],"family":{"kind":"kfree","k":[1000]}}"#,
        );
        let r = predict(&p, &[q(3)]).unwrap();
        assert_eq!(ab(&r), (q(1), 1));
        assert!(r.rigid);
        assert_eq!(r.alpha_peyre, Some(qf(1, 3)));
        let r = predict(&p, &[q(1)]).unwrap();
        assert_eq!(ab(&r), (q(3), 1));
        assert!(r.rigid);
    }

    #[test]
    fn conjugate_lines() {
        let base = r#"{"ambient":{"projective":3},"divisors":[{"name":"q","form":"x0^2 + x1^2","splitting":{"quadratic":-1}}],"family":{"kind":"campana","m":[2]GEO}}"#;
        let r = predict(&pair(&base.replace("GEO", "")), &[q(1)]).unwrap();
        assert_eq!(ab(&r), (q(2), 2));
        let r = predict(&pair(&base.replace("GEO", r#","geometric":true"#)), &[q(1)]).unwrap();
        assert_eq!(ab(&r), (q(2), 1));
    }
}
