//! Pairs (X, M): ambient space, boundary components, Galois action, multiplicity family,
//! strata and the generator set of the family.

pub mod config;
pub mod family;
pub mod forms;
pub mod galois;
pub mod reduce;
pub mod strata;

pub use config::{build_pair, ConfigDocument};
pub use family::{Atom, Family, FamilyKind, Mult};
pub use forms::Form;
pub use galois::{permute_vector, GaloisData};
pub use reduce::reduce_generators;
pub use strata::{StrataTable, StratumId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("form: {0}")]
    Form(String),
    #[error("galois: {0}")]
    Galois(String),
    #[error("family: {0}")]
    Family(String),
    #[error("strata: {0}")]
    Strata(String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    Projective(usize),
    Toric {
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    },
}

impl Ambient {
    /// Number of generators of the ambient Picard presentation.
    pub fn pic_generators(&self) -> usize {
        match self {
            Ambient::Projective(_) => 1,
            Ambient::Toric { rays, .. } => rays.len(),
        }
    }

    pub fn pic_rank(&self) -> usize {
        match self {
            Ambient::Projective(_) => 1,
            Ambient::Toric { rays, .. } => rays.len() - rays.first().map_or(0, |r| r.len()),
        }
    }

    /// Canonical class in generator coordinates.
    pub fn canonical(&self) -> Vec<i64> {
        match self {
            Ambient::Projective(n) => vec![-(*n as i64)],
            Ambient::Toric { rays, .. } => vec![-1; rays.len()],
        }
    }

    /// Linear relations among the generators.
    pub fn relations(&self) -> Vec<Vec<i64>> {
        match self {
            Ambient::Projective(_) => vec![],
            Ambient::Toric { rays, .. } => {
                let d = rays.first().map_or(0, |r| r.len());
                (0..d)
                    .map(|j| rays.iter().map(|r| r[j]).collect())
                    .collect()
            }
        }
    }

    /// Generators of the effective cone.
    pub fn effective_generators(&self) -> Vec<Vec<i64>> {
        let g = self.pic_generators();
        (0..g)
            .map(|i| (0..g).map(|j| i64::from(i == j)).collect())
            .collect()
    }

    /// Whether effective generators move in their linear system (projective hyperplanes do).
    pub fn movable_generators(&self) -> Vec<bool> {
        match self {
            Ambient::Projective(_) => vec![true],
            Ambient::Toric { rays, .. } => vec![false; rays.len()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    None,
    Quadratic(i64),
    Abstract,
}

/// q = a u^2 + b u v + c v^2 with b^2 - 4ac = d s^2; component 0 is 2a u + (b + s√d) v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticData {
    pub u: usize,
    pub v: usize,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub s: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSpec {
    pub name: String,
    pub form: Option<Form>,
    pub ray: Option<usize>,
    pub degree: u32,
    pub k: usize,
    pub splitting: Splitting,
    pub quadratic: Option<QuadraticData>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub divisor: usize,
    pub index: usize,
    /// Class in the ambient Picard generators.
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub w: Vec<u64>,
    pub stratum: StratumId,
}

#[derive(Clone, Debug)]
pub struct PairModel {
    pub name: String,
    pub ambient: Ambient,
    pub divisors: Vec<DivisorSpec>,
    pub components: Vec<Component>,
    pub galois: GaloisData,
    pub family: Family,
    pub strata: StrataTable,
    /// Whether the strata table was derived automatically and lists every support.
    pub strata_complete: bool,
    pub exempt: Vec<u64>,
    pub effective_s: Vec<u64>,
    pub height_degree: u32,
    pub l_class: Vec<i64>,
    pub generators: Vec<Generator>,
    pub proper: bool,
    pub config: ConfigDocument,
}

impl PairModel {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Components grouped by Galois orbit.
    pub fn component_orbits(&self) -> Vec<Vec<usize>> {
        self.galois.point_orbits()
    }

    /// Orbits of the generator set under the Galois action.
    pub fn generator_orbits(&self) -> Vec<Vec<usize>> {
        galois_orbits(&self.generators, &self.galois)
            .expect("generator set is Galois stable")
            .1
    }

    pub fn with_family(&self, family: Family) -> Result<PairModel, PairError> {
        let mut p = self.clone();
        p.family = family;
        p.generators = generators_of(&p.family, &p.strata)?;
        p.proper = p.family.is_proper();
        check_generators_stable(&p)?;
        Ok(p)
    }

    /// The same pair with a replaced generator set (used for reduced sets).
    pub fn with_generators(&self, gens: Vec<Generator>) -> PairModel {
        let mut p = self.clone();
        p.generators = gens;
        p
    }
}

pub fn membership(family: &Family, w: &[Mult]) -> bool {
    family.contains_ext(w)
}

pub fn generators_of(family: &Family, strata: &StrataTable) -> Result<Vec<Generator>, PairError> {
    let ws = family.minimal_vectors(&|s: &[usize]| strata.has(s))?;
    let mut out = Vec::new();
    for w in ws {
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0).collect();
        for stratum in strata.strata_of(&support) {
            out.push(Generator {
                w: w.clone(),
                stratum,
            });
        }
    }
    out.sort();
    Ok(out)
}

pub fn generators(pair: &PairModel) -> &[Generator] {
    &pair.generators
}

pub fn act_generator(p: &[usize], g: &Generator) -> Generator {
    Generator {
        w: permute_vector(p, &g.w),
        stratum: StrataTable::act(p, &g.stratum),
    }
}

pub fn galois_orbits(
    elements: &[Generator],
    g: &GaloisData,
) -> Result<(usize, Vec<Vec<usize>>), PairError> {
    g.orbits(elements, act_generator)
}

pub(crate) fn check_generators_stable(p: &PairModel) -> Result<(), PairError> {
    galois_orbits(&p.generators, &p.galois).map(|_| ())
}
