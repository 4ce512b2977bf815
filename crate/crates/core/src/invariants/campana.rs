use super::adjoint::{
    ambient_effective_cone, fujita_in_cone, rigid_in_cone, Decomposition, PairInvariants,
};
use super::canonical::{log_canonical_class, quasi_campana, CampanaData};
use super::pic::ambient_lattice;
use super::InvariantError;
use crate::exactlin::linalg::{add, scale, QVec, Q};
use crate::exactlin::{minimal_face, RationalCone};
use crate::pairspec::{
    act_generator, FamilyKind, GaloisData, Generator, Mult, PairModel, StrataTable,
};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionSets {
    pub b_orbits: usize,
    pub b_prime_orbits: usize,
    pub b: Vec<Generator>,
    pub b_prime: Vec<Generator>,
}

fn compositions(bounds: &[u64], f: &mut dyn FnMut(&[u64])) {
    let mut w = vec![0u64; bounds.len()];
    loop {
        f(&w);
        let mut i = 0;
        loop {
            if i == bounds.len() {
                return;
            }
            if w[i] < bounds[i] {
                w[i] += 1;
                break;
            }
            w[i] = 0;
            i += 1;
        }
    }
}

/// The tuple sets B and B′ behind the b correction for Campana-type families, with Galois orbit counts.
pub fn correction_sets(
    campana: &CampanaData,
    strata: &StrataTable,
    complete: bool,
    adjoint_support: &[usize],
) -> Result<CorrectionSets, InvariantError> {
    let n = campana.m.len();
    let bounds: Vec<u64> = (0..n)
        .map(|i| match campana.m[i] {
            Mult::Fin(m) if !adjoint_support.contains(&i) => m,
            _ => 0,
        })
        .collect();
    let mut found = Vec::new();
    let mut missing = None;
    compositions(&bounds, &mut |w| {
        let support: Vec<usize> = (0..n).filter(|&i| w[i] > 0).collect();
        if support.len() < 2 || campana.weighted(w) != Q::one() {
            return;
        }
        if !complete && !strata.entries.contains_key(&support) {
            missing.get_or_insert(support.clone());
            return;
        }
        for stratum in strata.strata_of(&support) {
            found.push(Generator {
                w: w.to_vec(),
                stratum,
            });
        }
    });
    if let Some(s) = missing {
        return Err(InvariantError::MissingStratum(s));
    }
    let in_one_orbit = |g: &Generator| {
        campana
            .orbits
            .iter()
            .any(|o| g.stratum.support.iter().all(|i| o.contains(i)))
    };
    let primed: Vec<Generator> = found.iter().filter(|g| in_one_orbit(g)).cloned().collect();
    let count = |items: &[Generator]| {
        campana
            .galois
            .orbits(items, act_generator)
            .map(|x| x.0)
            .map_err(InvariantError::from)
    };
    Ok(CorrectionSets {
        b_orbits: count(&found)?,
        b_prime_orbits: count(&primed)?,
        b: found,
        b_prime: primed,
    })
}

/// #({w ∈ ℕ^n : Σ w = m, min w = 0} / G), by Burnside and checked against the explicit orbits.
pub fn norm_form_b(n: usize, m: u64, g: &GaloisData) -> Result<usize, InvariantError> {
    let mut items = Vec::new();
    compositions(&vec![m; n], &mut |w| {
        if w.iter().sum::<u64>() == m && w.contains(&0) {
            items.push(w.to_vec());
        }
    });
    let (burnside, _) = g.orbits(&items, |p, w| crate::pairspec::permute_vector(p, w))?;
    Ok(burnside)
}

fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
}

/// (1/n)(C(n+m−1, n−1) − C(m−1, n−1)).
pub fn norm_form_b_closed(n: u64, m: u64) -> Q {
    let top = binomial(n + m - 1, n - 1) as i128
        - if m == 0 {
            0
        } else {
            binomial(m - 1, n - 1) as i128
        };
    Q::new(top.into(), (n as i128).into())
}

fn weighted_is_one(c: &CampanaData, w: &[u64]) -> bool {
    c.weighted(w) == Q::one()
}

fn is_axis(c: &CampanaData, w: &[u64]) -> bool {
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0).collect();
    support.len() == 1 && c.m[support[0]] == Mult::Fin(w[support[0]])
}

/// Log-canonical shortcuts for quasi-Campana pairs, cross-checked against the full cone.
pub(crate) fn decompose(
    pair: &PairModel,
    inv: &PairInvariants,
    l: &[Q],
    a: &Q,
    b: usize,
    rigid: bool,
) -> Result<Option<Decomposition>, InvariantError> {
    let Some(c) = quasi_campana(pair) else {
        return Ok(None);
    };
    let lattice = ambient_lattice(&pair.ambient);
    let eff = ambient_effective_cone(&pair.ambient, &lattice);
    let klog = log_canonical_class(&pair.ambient, &c);
    let a_log = fujita_in_cone(&eff, &lattice.free(&klog), &lattice.free(l))?;
    if &a_log != a {
        return Err(InvariantError::Inconsistent(format!(
            "log-canonical Fujita invariant {a_log} differs from {a}"
        )));
    }
    let adj: QVec = lattice.free(&add(&scale(a, l), &klog));
    let face = minimal_face(&eff.cone, &adj)
        .map_err(|_| InvariantError::Inconsistent("log adjoint class is not effective".into()))?;
    let face_cone = RationalCone::new(lattice.rank(), face.generators.clone());
    let class_free: Vec<QVec> = c
        .classes
        .iter()
        .map(|cl| {
            lattice.free(
                &cl.iter()
                    .map(|&x| Q::from_integer(x.into()))
                    .collect::<QVec>(),
            )
        })
        .collect();
    let in_face: Vec<bool> = class_free
        .iter()
        .map(|v| v.iter().any(|x| !x.is_zero()) && face_cone.contains(v))
        .collect();
    let boundary_cone = RationalCone::new(lattice.rank(), class_free.clone());
    let face_in_boundary = face.generators.iter().all(|g| boundary_cone.contains(g));
    let i_set: Vec<String> = inv
        .pres
        .orbits
        .iter()
        .enumerate()
        .filter(|(_, o)| {
            let w = &pair.generators[o[0]].w;
            weighted_is_one(&c, w)
                && !is_axis(&c, w)
                && (0..w.len()).all(|i| w[i] == 0 || !in_face[i])
        })
        .map(|(k, _)| inv.pres.labels[inv.pres.orbit_index(k)].clone())
        .collect();
    let rigid_log = a.is_positive() && rigid_in_cone(&eff, &adj)?.0;
    if a.is_positive() && rigid_log != rigid {
        return Err(InvariantError::Inconsistent(
            "rigidity shortcut disagrees with the full cone".into(),
        ));
    }
    if face_in_boundary && b != face.codim + i_set.len() {
        return Err(InvariantError::Inconsistent(format!(
            "b = {b} but b_base + #I = {} + {}",
            face.codim,
            i_set.len()
        )));
    }
    let correction = match pair.family.kind {
        FamilyKind::Campana | FamilyKind::Darmon | FamilyKind::WeakCampana => {
            let support: Vec<usize> = (0..in_face.len()).filter(|&i| in_face[i]).collect();
            let t = correction_sets(&c, &pair.strata, pair.strata_complete, &support)?;
            let extra = match pair.family.kind {
                _ if pair.family.geometric => 0,
                FamilyKind::WeakCampana => t.b_orbits,
                _ => t.b_prime_orbits,
            };
            if face_in_boundary && b != face.codim + extra {
                return Err(InvariantError::Inconsistent(format!(
                    "b = {b} but the orbit sets give {} + {extra}",
                    face.codim
                )));
            }
            Some(t)
        }
        _ => None,
    };
    Ok(Some(Decomposition {
        a_log,
        b_base: face.codim,
        i_set,
        rigid_log,
        face_in_boundary,
        correction,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::adjoint::predict;
    use super::*;
    use crate::exactlin::linalg::q;
    use crate::pairspec::{build_pair, ConfigDocument};

    fn pair(s: &str) -> PairModel {
        build_pair(&ConfigDocument::from_json(s).unwrap()).unwrap()
    }

    #[test]
    fn norm_form_b_values() {
        assert_eq!(norm_form_b(3, 2, &GaloisData::cyclic(3)).unwrap(), 2);
        assert_eq!(norm_form_b(5, 2, &GaloisData::cyclic(5)).unwrap(), 3);
        for m in 1..8 {
            assert_eq!(norm_form_b(2, m, &GaloisData::cyclic(2)).unwrap(), 1);
        }
        assert_eq!(norm_form_b_closed(3, 2), q(2));
        assert_eq!(norm_form_b_closed(5, 2), q(3));
    }

    #[test]
    fn conjugate_lines_sets() {
        let p = pair(
            r#"{"ambient":{"projective":3},"divisors":[{"name":"q","form":"x0^2 + x1^2","splitting":{"quadratic":-1}}],"family":{"kind":"campana","m":[2]}}"#,
        );
        let c = quasi_campana(&p).unwrap();
        let t = correction_sets(&c, &p.strata, p.strata_complete, &[]).unwrap();
        assert_eq!((t.b_orbits, t.b_prime_orbits), (1, 1));
        let r = predict(&p, &[q(1)]).unwrap();
        let d = r.decomposition.unwrap();
        assert_eq!((d.b_base, d.i_set.len()), (1, 1));
    }

    #[test]
    fn coordinate_planes() {
        let p = pair(
            r#"{"ambient":{"projective":3},"divisors":[{"name":"a","form":"x0"},{"name":"b","form":"x1"},{"name":"c","form":"x2"}],"family":{"kind":"weak_campana","m":[2]}}"#,
        );
        let c = quasi_campana(&p).unwrap();
        let t = correction_sets(&c, &p.strata, p.strata_complete, &[]).unwrap();
        assert_eq!((t.b_orbits, t.b_prime_orbits), (3, 0));
        // log-anticanonical L = −K − D_m = 3/2 H
        let r = predict(&p, &[q(3) / q(2)]).unwrap();
        assert_eq!((r.a.clone(), r.b), (q(1), 4));
        assert_eq!(r.decomposition.unwrap().i_set.len(), 3);
    }

    #[test]
    fn missing_stratum_is_reported() {
        let p = pair(
            r#"{"ambient":{"projective":3},"divisors":[{"name":"a","form":"x0"},{"name":"b","form":"x1"}],"family":{"kind":"campana","m":[2]},"strata":[]}"#,
        );
        let c = quasi_campana(&p).unwrap();
        assert_eq!(
            correction_sets(&c, &p.strata, p.strata_complete, &[]),
            Err(InvariantError::MissingStratum(vec![0, 1]))
        );
    }
}
