use super::family::{Atom, Family, FamilyKind, Mult};
use super::forms::Form;
use super::galois::GaloisData;
use super::strata::{quad_rank, QuadElt, StrataTable};
use super::{
    check_generators_stable, generators_of, Ambient, Component, DivisorSpec, PairError, PairModel,
    QuadraticData, Splitting,
};
use crate::exactlin::linalg::q;
use crate::exactlin::snf::{smith_normal_form, IntMatrix};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientConfig {
    Projective(usize),
    Toric {
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingConfig {
    None,
    Quadratic(i64),
    Abstract,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<Mult>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub geometric: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clauses: Vec<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub global_sum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_box: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrataEntry {
    pub support: Vec<usize>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrataConfig {
    Mode(String),
    Explicit(Vec<StrataEntry>),
}

impl Default for StrataConfig {
    fn default() -> Self {
        StrataConfig::Mode("auto".into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightConfig {
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_height: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

/// Prime element x + y√d of norm ±p, used for real quadratic splittings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeElement {
    pub d: i64,
    pub p: u64,
    pub x: i64,
    pub y: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ambient: AmbientConfig,
    #[serde(default)]
    pub divisors: Vec<DivisorConfig>,
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galois: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    #[serde(default)]
    pub strata: StrataConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exempt_primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightConfig>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prime_elements: Vec<PrimeElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

impl ConfigDocument {
    pub fn from_json(s: &str) -> Result<Self, PairError> {
        serde_json::from_str(s).map_err(|e| PairError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn cfg_err(msg: impl Into<String>) -> PairError {
    PairError::Config(msg.into())
}

fn is_squarefree(d: i64) -> bool {
    let mut x = d.unsigned_abs();
    let mut p = 2;
    while p * p <= x {
        if x % (p * p) == 0 {
            return false;
        }
        if x % p == 0 {
            x /= p;
        }
        p += 1;
    }
    true
}

fn isqrt(x: u64) -> u64 {
    num_integer::Roots::sqrt(&x)
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            out.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn build_ambient(a: &AmbientConfig) -> Result<Ambient, PairError> {
    match a {
        AmbientConfig::Projective(n) => {
            if *n < 2 {
                return Err(cfg_err("projective ambient needs at least 2 coordinates"));
            }
            Ok(Ambient::Projective(*n))
        }
        AmbientConfig::Toric { rays, cones } => {
            let d = rays
                .first()
                .map(|r| r.len())
                .ok_or_else(|| cfg_err("toric fan without rays"))?;
            if rays
                .iter()
                .any(|r| r.len() != d || r.iter().all(|&x| x == 0))
            {
                return Err(cfg_err("toric rays must be nonzero and of equal length"));
            }
            for c in cones {
                if c.iter().any(|&i| i >= rays.len()) {
                    return Err(cfg_err("cone refers to a missing ray"));
                }
                if c.len() == d {
                    let m = IntMatrix::from_i64(
                        d,
                        &c.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>(),
                    );
                    let s = smith_normal_form(&m);
                    if s.rank() != d || !s.torsion().is_empty() {
                        return Err(cfg_err(format!("cone {c:?} is not smooth")));
                    }
                }
            }
            for i in 0..rays.len() {
                if !cones.iter().any(|c| c.contains(&i)) {
                    return Err(cfg_err(format!("ray {i} lies in no cone")));
                }
            }
            Ok(Ambient::Toric {
                rays: rays.clone(),
                cones: cones.clone(),
            })
        }
    }
}

fn build_divisor(dc: &DivisorConfig, ambient: &Ambient) -> Result<DivisorSpec, PairError> {
    let splitting = match &dc.splitting {
        None | Some(SplittingConfig::None) => Splitting::None,
        Some(SplittingConfig::Quadratic(d)) => Splitting::Quadratic(*d),
        Some(SplittingConfig::Abstract) => Splitting::Abstract,
    };
    match ambient {
        Ambient::Toric { rays, .. } => {
            let ray = dc.ray.ok_or_else(|| {
                cfg_err(format!(
                    "divisor {} needs a ray on a toric ambient",
                    dc.name
                ))
            })?;
            if ray >= rays.len() {
                return Err(cfg_err(format!(
                    "divisor {} refers to missing ray {ray}",
                    dc.name
                )));
            }
            if dc.form.is_some() || splitting != Splitting::None {
                return Err(cfg_err("toric divisors are ray divisors"));
            }
            Ok(DivisorSpec {
                name: dc.name.clone(),
                form: None,
                ray: Some(ray),
                degree: 1,
                k: 1,
                splitting,
                quadratic: None,
            })
        }
        Ambient::Projective(n) => {
            let src = dc
                .form
                .as_ref()
                .ok_or_else(|| cfg_err(format!("divisor {} needs a form", dc.name)))?;
            let form = Form::parse(src, *n)?;
            let degree = form
                .degree()
                .ok_or_else(|| PairError::Form(format!("`{src}` is not homogeneous")))?;
            if let Some(dd) = dc.degree {
                if dd != degree {
                    return Err(cfg_err(format!(
                        "divisor {} declares degree {dd} but the form has degree {degree}",
                        dc.name
                    )));
                }
            }
            let mut quadratic = None;
            let k = match splitting {
                Splitting::None => 1,
                Splitting::Quadratic(d) => {
                    if d == 0 || d == 1 || !is_squarefree(d) {
                        return Err(cfg_err(format!("{d} is not a squarefree non-square")));
                    }
                    let (u, v, a, b, c) = form.binary_quadratic().ok_or_else(|| {
                        cfg_err(format!(
                            "quadratic splitting of {} needs a binary quadratic form",
                            dc.name
                        ))
                    })?;
                    let disc = b * b - 4 * a * c;
                    let s2 = disc / d;
                    if disc % d != 0 || s2 <= 0 || isqrt(s2 as u64).pow(2) != s2 as u64 {
                        return Err(cfg_err(format!(
                            "discriminant {disc} of {} is not {d} times a square",
                            dc.name
                        )));
                    }
                    quadratic = Some(QuadraticData {
                        u,
                        v,
                        a,
                        b,
                        c,
                        d,
                        s: isqrt(s2 as u64) as i64,
                    });
                    2
                }
                Splitting::Abstract => dc
                    .components
                    .ok_or_else(|| cfg_err("abstract splitting needs a component count"))?,
            };
            if let Some(kc) = dc.components {
                if kc != k {
                    return Err(cfg_err(format!(
                        "divisor {} declares {kc} components, splitting gives {k}",
                        dc.name
                    )));
                }
            }
            if k == 0 || degree as usize % k != 0 {
                return Err(cfg_err(format!(
                    "degree of {} is not divisible by its component count",
                    dc.name
                )));
            }
            Ok(DivisorSpec {
                name: dc.name.clone(),
                form: Some(form),
                ray: None,
                degree,
                k,
                splitting,
                quadratic,
            })
        }
    }
}

fn expand_m(
    m: &[Mult],
    divisors: &[DivisorSpec],
    n: usize,
    what: &str,
) -> Result<Vec<Mult>, PairError> {
    if m.len() == n {
        Ok(m.to_vec())
    } else if m.len() == divisors.len() {
        Ok(divisors
            .iter()
            .zip(m)
            .flat_map(|(d, x)| std::iter::repeat_n(*x, d.k))
            .collect())
    } else if m.len() == 1 {
        Ok(vec![m[0]; n])
    } else {
        Err(cfg_err(format!(
            "{what} has {} entries; expected 1, {} divisors or {n} components",
            m.len(),
            divisors.len()
        )))
    }
}

fn build_family(
    fc: &FamilyConfig,
    divisors: &[DivisorSpec],
    groups: Vec<usize>,
) -> Result<Family, PairError> {
    let n = groups.len();
    let mut fam = match fc.kind {
        FamilyKind::Kfree => {
            let k: Vec<Mult> = fc.k.iter().map(|&x| Mult::Fin(x)).collect();
            let k = if k.is_empty() {
                vec![Mult::Fin(1); n]
            } else {
                expand_m(&k, divisors, n, "k")?
            };
            Family::split(FamilyKind::Kfree, k)
        }
        FamilyKind::Integral => {
            let subset = fc.subset.clone().unwrap_or_else(|| (0..n).collect());
            if subset.iter().any(|&i| i >= n) {
                return Err(cfg_err("integral subset refers to a missing component"));
            }
            Family::split(
                FamilyKind::Integral,
                (0..n)
                    .map(|i| {
                        if subset.contains(&i) {
                            Mult::Inf
                        } else {
                            Mult::Fin(1)
                        }
                    })
                    .collect(),
            )
        }
        FamilyKind::Custom => {
            let m = if fc.m.is_empty() {
                vec![Mult::Fin(1); n]
            } else {
                expand_m(&fc.m, divisors, n, "m")?
            };
            if fc.clauses.is_empty() || fc.clauses.iter().any(|c| c.len() != n) {
                return Err(cfg_err(format!(
                    "custom family needs clauses with {n} atoms each"
                )));
            }
            if fc
                .clauses
                .iter()
                .flatten()
                .any(|a| matches!(a, Atom::Divisible(0)))
            {
                return Err(cfg_err("divisibility by 0 is not an atom"));
            }
            Family::custom(m, fc.clauses.clone(), fc.global_sum)
        }
        kind => {
            if fc.m.is_empty() {
                return Err(cfg_err("family needs multiplicities m"));
            }
            let m = expand_m(&fc.m, divisors, n, "m")?;
            if m.contains(&Mult::Fin(0)) {
                return Err(cfg_err("multiplicities are positive"));
            }
            Family::split(kind, m)
        }
    };
    fam.groups = groups;
    fam.geometric = fc.geometric;
    fam.search_box = fc.search_box;
    if !fam.contains(&vec![0; n]) {
        return Err(PairError::Family(
            "the family does not contain the zero vector".into(),
        ));
    }
    Ok(fam)
}

fn check_family_invariant(fam: &Family, g: &GaloisData) -> Result<(), PairError> {
    let n = fam.n();
    for p in &g.generators {
        for i in 0..n {
            if fam.m[i] != fam.m[p[i]] || fam.k[i] != fam.k[p[i]] {
                return Err(PairError::Galois(format!(
                    "permutation {p:?} moves component {i} to one with different multiplicity"
                )));
            }
            for j in 0..n {
                if (fam.groups[i] == fam.groups[j]) != (fam.groups[p[i]] == fam.groups[p[j]]) {
                    return Err(PairError::Galois(format!(
                        "permutation {p:?} does not respect the divisors"
                    )));
                }
            }
        }
        if fam.kind == FamilyKind::Custom {
            let clauses: BTreeSet<Vec<Atom>> = fam.clauses.iter().cloned().collect();
            let moved: BTreeSet<Vec<Atom>> = fam
                .clauses
                .iter()
                .map(|c| super::permute_vector(p, c))
                .collect();
            if clauses != moved {
                return Err(PairError::Galois(
                    "permutation does not preserve the custom clauses".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Linear form of each component over ℚ(√d), if available.
fn component_linear_forms(
    divisors: &[DivisorSpec],
    nvars: usize,
) -> Vec<Option<(i64, Vec<QuadElt>)>> {
    let mut out = Vec::new();
    for d in divisors {
        let form = d.form.as_ref();
        match (&d.splitting, form) {
            (Splitting::None, Some(f)) => out.push(
                f.linear_coefficients()
                    .map(|c| (1, c.iter().map(|&x| QuadElt::rational(q(x))).collect())),
            ),
            (Splitting::Quadratic(_), Some(_)) => {
                let qd = d.quadratic.as_ref().expect("quadratic data");
                for sign in [1, -1] {
                    let mut row = vec![QuadElt::rational(q(0)); nvars];
                    row[qd.u] = QuadElt::rational(q(2 * qd.a));
                    row[qd.v] = QuadElt {
                        a: q(qd.b),
                        b: q(sign * qd.s),
                    };
                    out.push(Some((qd.d, row)));
                }
            }
            _ => out.extend(std::iter::repeat_n(None, d.k)),
        }
    }
    out
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1usize..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn auto_strata(
    ambient: &Ambient,
    divisors: &[DivisorSpec],
    n: usize,
) -> Result<StrataTable, PairError> {
    if n > 16 {
        return Err(PairError::Strata(
            "too many components for automatic strata".into(),
        ));
    }
    let mut t = StrataTable::default();
    match ambient {
        Ambient::Toric { cones, .. } => {
            let rays: Vec<usize> = divisors
                .iter()
                .map(|d| d.ray.expect("toric divisor"))
                .collect();
            for s in subsets(n) {
                let rs: BTreeSet<usize> = s.iter().map(|&i| rays[i]).collect();
                let nonempty =
                    rs.len() == s.len() && cones.iter().any(|c| rs.iter().all(|r| c.contains(r)));
                t.entries.insert(s, usize::from(nonempty));
            }
        }
        Ambient::Projective(nv) => {
            let lin = component_linear_forms(divisors, *nv);
            for s in subsets(n) {
                if s.len() == 1 {
                    t.entries.insert(s, 1);
                    continue;
                }
                let mut rows = Vec::new();
                let mut field = 1;
                for &i in &s {
                    let Some((d, row)) = &lin[i] else {
                        return Err(PairError::Strata(format!(
                            "cannot intersect the components {s:?} automatically; list strata explicitly"
                        )));
                    };
                    if *d != 1 {
                        if field != 1 && field != *d {
                            return Err(PairError::Strata(format!(
                                "components {s:?} need a biquadratic field; list strata explicitly"
                            )));
                        }
                        field = *d;
                    }
                    rows.push(row.clone());
                }
                let r = quad_rank(&rows, if field == 1 { -1 } else { field });
                t.entries.insert(s, usize::from(r < *nv));
            }
        }
    }
    Ok(t)
}

fn bad_primes(divisors: &[DivisorSpec], nvars: usize) -> Vec<u64> {
    let mut bad = BTreeSet::new();
    let mut rational_rows: Vec<Vec<i64>> = Vec::new();
    for d in divisors {
        if let Some(qd) = &d.quadratic {
            let x = (2 * qd.a * qd.s * qd.d).unsigned_abs();
            bad.extend(prime_factors(x));
        } else if let Some(c) = d.form.as_ref().and_then(|f| f.linear_coefficients()) {
            rational_rows.push(c);
        }
    }
    let m = rational_rows.len();
    if m <= 12 {
        for s in subsets(m) {
            let rows: Vec<Vec<i64>> = s.iter().map(|&i| rational_rows[i].clone()).collect();
            let snf = smith_normal_form(&IntMatrix::from_i64(nvars, &rows));
            for f in snf.torsion() {
                if let Some(x) = f.to_u64() {
                    bad.extend(prime_factors(x));
                }
            }
        }
    }
    bad.into_iter().collect()
}

/// Validate a configuration document and expand it into a pair.
pub fn build_pair(config: &ConfigDocument) -> Result<PairModel, PairError> {
    let ambient = build_ambient(&config.ambient)?;
    if config.divisors.is_empty() && config.family.kind != FamilyKind::Integral {
        return Err(cfg_err("no boundary divisors"));
    }
    let names: BTreeSet<&str> = config.divisors.iter().map(|d| d.name.as_str()).collect();
    if names.len() != config.divisors.len() {
        return Err(cfg_err("divisor names must be distinct"));
    }
    let divisors: Vec<DivisorSpec> = config
        .divisors
        .iter()
        .map(|d| build_divisor(d, &ambient))
        .collect::<Result<_, _>>()?;
    let mut components = Vec::new();
    for (di, d) in divisors.iter().enumerate() {
        for j in 0..d.k {
            let class = match &ambient {
                Ambient::Projective(_) => vec![(d.degree as usize / d.k) as i64],
                Ambient::Toric { rays, .. } => (0..rays.len())
                    .map(|r| i64::from(Some(r) == d.ray))
                    .collect(),
            };
            let name = if d.k == 1 {
                d.name.clone()
            } else {
                format!("{}[{j}]", d.name)
            };
            components.push(Component {
                name,
                divisor: di,
                index: j,
                class,
            });
        }
    }
    let n = components.len();
    let groups: Vec<usize> = components.iter().map(|c| c.divisor).collect();
    let family = build_family(&config.family, &divisors, groups)?;

    let galois = match &config.galois {
        Some(gens) => GaloisData::from_generators(n, gens.clone())?,
        None => {
            if divisors.iter().any(|d| d.splitting == Splitting::Abstract) {
                return Err(cfg_err(
                    "abstract splitting needs an explicit Galois action",
                ));
            }
            let mut ds: Vec<i64> = divisors
                .iter()
                .filter_map(|d| d.quadratic.as_ref().map(|q| q.d))
                .collect();
            ds.sort();
            ds.dedup();
            let mut gens = Vec::new();
            for d in ds {
                let mut p: Vec<usize> = (0..n).collect();
                let mut start = 0;
                for dv in &divisors {
                    if dv.quadratic.as_ref().is_some_and(|q| q.d == d) {
                        p.swap(start, start + 1);
                    }
                    start += dv.k;
                }
                gens.push(p);
            }
            GaloisData::from_generators(n, gens)?
        }
    };
    if let Some(order) = config.group_order {
        if order != galois.order() {
            return Err(PairError::Galois(format!(
                "declared order {order}, generated group has order {}",
                galois.order()
            )));
        }
    }
    check_family_invariant(&family, &galois)?;

    let (strata, complete) = match &config.strata {
        StrataConfig::Mode(m) if m == "auto" => (auto_strata(&ambient, &divisors, n)?, true),
        StrataConfig::Mode(m) => return Err(cfg_err(format!("unknown strata mode `{m}`"))),
        StrataConfig::Explicit(list) => {
            let mut t = StrataTable::default();
            for i in 0..n {
                t.entries.insert(vec![i], 1);
            }
            for e in list {
                let mut s = e.support.clone();
                s.sort();
                s.dedup();
                if s.is_empty() || s.iter().any(|&i| i >= n) {
                    return Err(cfg_err(format!(
                        "strata entry {:?} refers to missing components",
                        e.support
                    )));
                }
                t.entries.insert(s, e.count);
            }
            (t, false)
        }
    };
    strata.check_invariant(&galois)?;

    let generators = generators_of(&family, &strata)?;
    let proper = family.is_proper();
    let nvars = match ambient {
        Ambient::Projective(nv) => nv,
        Ambient::Toric { .. } => 0,
    };
    let mut s: BTreeSet<u64> = config.exempt_primes.iter().copied().collect();
    s.extend(bad_primes(&divisors, nvars));
    let height_degree = config.height.as_ref().map_or(1, |h| h.degree);
    if height_degree == 0 {
        return Err(cfg_err("height degree must be positive"));
    }
    let l_class = match (&config.l, &ambient) {
        (Some(l), a) => {
            if l.len() != a.pic_generators() {
                return Err(cfg_err("L has the wrong number of coordinates"));
            }
            l.clone()
        }
        (None, Ambient::Projective(_)) => vec![height_degree as i64],
        (None, a) => a.canonical().iter().map(|x| -x).collect(),
    };
    let pair = PairModel {
        name: config.name.clone().unwrap_or_else(|| "pair".into()),
        ambient,
        divisors,
        components,
        galois,
        family,
        strata,
        strata_complete: complete,
        exempt: config.exempt_primes.clone(),
        effective_s: s.into_iter().collect(),
        height_degree,
        l_class,
        generators,
        proper,
        config: config.clone(),
    };
    check_generators_stable(&pair)?;
    Ok(pair)
}
