use super::pic::{pullback_class, PicPresentation};
use super::InvariantError;
use crate::exactlin::linalg::{q, qf, solve_combination, sub, QVec, Q};
use crate::pairspec::{Ambient, Form, GaloisData, Mult, PairModel};
use num_traits::Zero;

fn ambient_canonical(a: &Ambient) -> QVec {
    a.canonical().iter().map(|&x| q(x)).collect()
}

/// K_(X,M) = pr*K_X + Σ_Γ (−1 + Σ_i w_i) D̃_w.
pub fn canonical_class_ramification(pres: &PicPresentation, pair: &PairModel) -> QVec {
    let mut k = pullback_class(pres, &ambient_canonical(&pair.ambient));
    for (j, o) in pres.orbits.iter().enumerate() {
        let s: u64 = pair.generators[o[0]].w.iter().sum();
        k[pres.orbit_index(j)] += q(s as i64 - 1);
    }
    k
}

/// K_(X,M) = pr*(K_X + Σ D_i) − Σ_Γ D̃_w.
pub fn canonical_class_hurwitz(pres: &PicPresentation, pair: &PairModel) -> QVec {
    let mut base = ambient_canonical(&pair.ambient);
    for c in &pair.components {
        for (j, x) in c.class.iter().enumerate() {
            base[j] += q(*x);
        }
    }
    let mut k = pullback_class(pres, &base);
    for j in 0..pres.orbits.len() {
        k[pres.orbit_index(j)] -= q(1);
    }
    k
}

/// The canonical class, after checking that both formulas agree in Pic(X,M).
pub fn canonical_class(pres: &PicPresentation, pair: &PairModel) -> Result<QVec, InvariantError> {
    let k1 = canonical_class_ramification(pres, pair);
    let k2 = canonical_class_hurwitz(pres, pair);
    if !pres.lattice.is_relation(&sub(&k1, &k2)) {
        return Err(InvariantError::Inconsistent(
            "canonical class formulas disagree".into(),
        ));
    }
    Ok(k1)
}

/// Weights of a quasi-Campana pair together with the boundary classes on X.
#[derive(Clone, Debug)]
pub struct CampanaData {
    pub m: Vec<Mult>,
    /// Component orbits under the Galois action.
    pub orbits: Vec<Vec<usize>>,
    pub classes: Vec<Vec<i64>>,
    pub galois: GaloisData,
}

impl CampanaData {
    /// Σ w_i / m_i, with ∞ weights contributing nothing.
    pub fn weighted(&self, w: &[u64]) -> Q {
        w.iter()
            .zip(&self.m)
            .fold(Q::zero(), |acc, (&wi, mi)| match mi {
                Mult::Fin(m) => acc + qf(wi as i64, *m as i64),
                Mult::Inf => acc,
            })
    }
}

/// Weights m with (X,M) quasi-Campana for (X, D_m), if such weights exist.
pub fn quasi_campana(pair: &PairModel) -> Option<CampanaData> {
    let n = pair.n();
    let d = pair.family.proper_weights();
    let m: Vec<Mult> = d.iter().map(|x| x.map_or(Mult::Inf, Mult::Fin)).collect();
    for i in 0..n {
        if m[i] == Mult::Inf {
            let mut w = vec![Mult::Fin(0); n];
            w[i] = Mult::Inf;
            if pair.family.contains_ext(&w) || pair.generators.iter().any(|g| g.w[i] > 0) {
                return None;
            }
        }
    }
    let data = CampanaData {
        m,
        orbits: pair.component_orbits(),
        classes: pair.components.iter().map(|c| c.class.clone()).collect(),
        galois: pair.galois.clone(),
    };
    if pair.generators.iter().any(|g| data.weighted(&g.w) < q(1)) {
        return None;
    }
    Some(data)
}

/// K_X + Σ (1 − 1/m_i) [D_i] in ambient Picard coordinates.
pub fn log_canonical_class(ambient: &Ambient, campana: &CampanaData) -> QVec {
    let mut k = ambient_canonical(ambient);
    for (mi, class) in campana.m.iter().zip(&campana.classes) {
        let coef = match mi {
            Mult::Fin(m) => q(1) - qf(1, *m as i64),
            Mult::Inf => q(1),
        };
        for (j, c) in class.iter().enumerate() {
            k[j] += &coef * q(*c);
        }
    }
    k
}

/// Pullback of D_m: Σ (1 − 1/m_i) pr*D_i.
pub fn pullback_log(pres: &PicPresentation, ambient: &Ambient, campana: &CampanaData) -> QVec {
    pullback_class(pres, &log_canonical_class(ambient, campana))
}

/// μ(w, D) for a linear form D through the stratum cut out by the linear boundary forms in the support of w.
pub fn mu_linear(w: &[u64], boundary: &[Form], divisor: &Form) -> Result<u64, InvariantError> {
    let unsupported = || InvariantError::Unsupported("mu_linear needs linear forms".into());
    let target: QVec = divisor
        .linear_coefficients()
        .ok_or_else(unsupported)?
        .iter()
        .map(|&x| q(x))
        .collect();
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0).collect();
    let mut cols = Vec::new();
    for &i in &support {
        cols.push(
            boundary[i]
                .linear_coefficients()
                .ok_or_else(unsupported)?
                .iter()
                .map(|&x| q(x))
                .collect::<QVec>(),
        );
    }
    if target.iter().all(|x| x.is_zero()) {
        return Err(InvariantError::Unsupported("zero divisor form".into()));
    }
    let Some(lambda) = solve_combination(&cols, &target) else {
        return Ok(0);
    };
    let g = support
        .iter()
        .fold(0u64, |acc, &i| num_integer::gcd(acc, w[i]));
    let min = support
        .iter()
        .zip(&lambda)
        .filter(|(_, l)| !l.is_zero())
        .map(|(&i, _)| w[i] / g)
        .min()
        .unwrap_or(0);
    Ok(g * min)
}
