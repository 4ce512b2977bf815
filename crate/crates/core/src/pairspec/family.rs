use super::PairError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A multiplicity in N* ∪ {∞}, or a valuation in N ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mult {
    Fin(u64),
    Inf,
}

impl Mult {
    pub fn finite(self) -> Option<u64> {
        match self {
            Mult::Fin(x) => Some(x),
            Mult::Inf => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Mult::Fin(0)
    }

    fn plus(self, o: Mult) -> Mult {
        match (self, o) {
            (Mult::Fin(a), Mult::Fin(b)) => Mult::Fin(a + b),
            _ => Mult::Inf,
        }
    }

    /// self ≥ m, with ∞ ≥ everything.
    fn at_least(self, m: Mult) -> bool {
        match (self, m) {
            (Mult::Inf, _) => true,
            (Mult::Fin(_), Mult::Inf) => false,
            (Mult::Fin(a), Mult::Fin(b)) => a >= b,
        }
    }

    /// m divides self: only 0 is divisible by ∞, ∞ is divisible by every positive integer.
    fn divisible_by(self, m: Mult) -> bool {
        match (self, m) {
            (Mult::Fin(a), Mult::Fin(b)) => b != 0 && a % b == 0,
            (Mult::Fin(a), Mult::Inf) => a == 0,
            (Mult::Inf, Mult::Fin(_)) => true,
            (Mult::Inf, Mult::Inf) => false,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Fin(x) => write!(f, "{x}"),
            Mult::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MultRepr {
    Num(u64),
    Text(String),
}

impl Serialize for Mult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Mult::Fin(x) => MultRepr::Num(*x).serialize(s),
            Mult::Inf => MultRepr::Text("inf".into()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Mult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match MultRepr::deserialize(d)? {
            MultRepr::Num(x) => Ok(Mult::Fin(x)),
            MultRepr::Text(t) if t == "inf" || t == "∞" => Ok(Mult::Inf),
            MultRepr::Text(t) => Err(serde::de::Error::custom(format!("bad multiplicity `{t}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    Zero,
    AtLeast(u64),
    Divisible(u64),
    Any,
}

impl Atom {
    fn holds(self, w: Mult) -> bool {
        match self {
            Atom::Zero => w.is_zero(),
            Atom::AtLeast(k) => w.at_least(Mult::Fin(k)),
            Atom::Divisible(k) => w.divisible_by(Mult::Fin(k)),
            Atom::Any => true,
        }
    }

    fn constant(self) -> u64 {
        match self {
            Atom::AtLeast(k) | Atom::Divisible(k) => k,
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Campana,
    Darmon,
    WeakCampana,
    Kfree,
    Integral,
    Custom,
}

/// A multiplicity family on n geometric components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub kind: FamilyKind,
    /// Per component; integral pairs use ∞ on the removed components and 1 elsewhere.
    pub m: Vec<Mult>,
    /// Per component bound for k-free families.
    pub k: Vec<u64>,
    /// Component to K-divisor group.
    pub groups: Vec<usize>,
    pub geometric: bool,
    pub clauses: Vec<Vec<Atom>>,
    pub global_sum: bool,
    pub search_box: Option<u64>,
}

impl Family {
    pub fn split(kind: FamilyKind, m: Vec<Mult>) -> Family {
        let n = m.len();
        let (m, k) = match kind {
            FamilyKind::Kfree => (
                vec![Mult::Fin(1); n],
                m.iter().map(|x| x.finite().unwrap_or(1)).collect(),
            ),
            _ => (m, vec![0; n]),
        };
        Family {
            kind,
            m,
            k,
            groups: (0..n).collect(),
            geometric: false,
            clauses: vec![],
            global_sum: false,
            search_box: None,
        }
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn custom(m: Vec<Mult>, clauses: Vec<Vec<Atom>>, global_sum: bool) -> Family {
        let n = m.len();
        Family {
            kind: FamilyKind::Custom,
            clauses,
            global_sum,
            ..Family::split(FamilyKind::Campana, m).with_groups((0..n).collect())
        }
    }

    pub fn with_groups(mut self, groups: Vec<usize>) -> Family {
        self.groups = groups;
        self
    }

    pub fn geometric(mut self, g: bool) -> Family {
        self.geometric = g;
        self
    }

    /// True when every condition is imposed on single components.
    pub fn is_split(&self) -> bool {
        if self.geometric || matches!(self.kind, FamilyKind::Custom | FamilyKind::WeakCampana) {
            return true;
        }
        let mut seen = std::collections::BTreeSet::new();
        self.groups.iter().all(|g| seen.insert(*g))
    }

    fn units(&self) -> Vec<Vec<usize>> {
        if self.is_split() {
            return (0..self.n()).map(|i| vec![i]).collect();
        }
        let mut ids: Vec<usize> = self.groups.clone();
        ids.sort();
        ids.dedup();
        ids.iter()
            .map(|g| (0..self.n()).filter(|&i| self.groups[i] == *g).collect())
            .collect()
    }

    fn weighted_sum_at_least_one(&self, w: &[Mult]) -> bool {
        // sum over m_i != 1 of w_i/m_i >= 1
        let mut l: u128 = 1;
        for m in &self.m {
            if let Mult::Fin(x) = m {
                if *x > 1 {
                    l = num_integer::lcm(l, *x as u128);
                }
            }
        }
        let mut total: u128 = 0;
        for (wi, mi) in w.iter().zip(&self.m) {
            match (wi, mi) {
                (_, Mult::Inf) | (_, Mult::Fin(0)) | (_, Mult::Fin(1)) => {}
                (Mult::Inf, _) => return true,
                (Mult::Fin(a), Mult::Fin(b)) => total += *a as u128 * (l / *b as u128),
            }
        }
        total >= l
    }

    pub fn contains_ext(&self, w: &[Mult]) -> bool {
        assert_eq!(w.len(), self.n(), "vector of wrong length");
        let zero = w.iter().all(|x| x.is_zero());
        match self.kind {
            FamilyKind::Campana | FamilyKind::Integral | FamilyKind::Darmon | FamilyKind::Kfree => {
                self.units().iter().all(|u| {
                    let s = u.iter().fold(Mult::Fin(0), |acc, &i| acc.plus(w[i]));
                    let m = self.m[u[0]];
                    match self.kind {
                        FamilyKind::Darmon => s.divisible_by(m),
                        FamilyKind::Kfree => !s.at_least(Mult::Fin(self.k[u[0]] + 1)),
                        _ => match m {
                            Mult::Inf => s.is_zero(),
                            m => s.is_zero() || s.at_least(m),
                        },
                    }
                })
            }
            FamilyKind::WeakCampana => {
                w.iter()
                    .zip(&self.m)
                    .all(|(wi, mi)| *mi != Mult::Inf || wi.is_zero())
                    && (zero || self.weighted_sum_at_least_one(w))
            }
            FamilyKind::Custom => {
                let clause_ok = self
                    .clauses
                    .iter()
                    .any(|c| c.iter().zip(w).all(|(a, x)| a.holds(*x)));
                clause_ok && (zero || !self.global_sum || self.weighted_sum_at_least_one(w))
            }
        }
    }

    pub fn contains(&self, w: &[u64]) -> bool {
        let v: Vec<Mult> = w.iter().map(|&x| Mult::Fin(x)).collect();
        self.contains_ext(&v)
    }

    fn max_constant(&self) -> u64 {
        let mut c = self.m.iter().filter_map(|m| m.finite()).max().unwrap_or(1);
        c = c.max(self.k.iter().copied().max().unwrap_or(0));
        for cl in &self.clauses {
            for a in cl {
                c = c.max(a.constant());
            }
        }
        c
    }

    /// Per-coordinate box bound, and whether reaching it signals an unclosed search.
    fn search_bounds(&self) -> Result<(Vec<u64>, bool), PairError> {
        let n = self.n();
        let generic = self.search_box.unwrap_or(2 * self.max_constant() + 2);
        let b = match self.kind {
            FamilyKind::Campana | FamilyKind::Integral => (
                self.m
                    .iter()
                    .map(|m| m.finite().map_or(0, |x| (2 * x).saturating_sub(1)))
                    .collect(),
                false,
            ),
            FamilyKind::Darmon => (
                self.m.iter().map(|m| m.finite().unwrap_or(0)).collect(),
                false,
            ),
            FamilyKind::Kfree => (vec![1; n], false),
            FamilyKind::WeakCampana => {
                let has_one = self.m.contains(&Mult::Fin(1));
                let has_other = self.m.iter().any(|m| matches!(m, Mult::Fin(x) if *x > 1));
                if has_one && has_other {
                    return Err(PairError::Family(
                        "weak Campana family with a weight 1 next to larger weights has infinitely many generators".into(),
                    ));
                }
                (
                    self.m
                        .iter()
                        .map(|m| m.finite().map_or(0, |x| (2 * x).saturating_sub(1)))
                        .collect(),
                    false,
                )
            }
            FamilyKind::Custom => (vec![generic; n], true),
        };
        Ok(b)
    }

    /// Minimal d ≥ 1 with d·e_i in the family, searched up to the generic bound.
    pub fn proper_weights(&self) -> Vec<Option<u64>> {
        let bound = self.search_box.unwrap_or(2 * self.max_constant() + 2);
        (0..self.n())
            .map(|i| {
                (1..=bound).find(|&d| {
                    let mut w = vec![0; self.n()];
                    w[i] = d;
                    self.contains(&w)
                })
            })
            .collect()
    }

    pub fn is_proper(&self) -> bool {
        self.proper_weights().iter().all(|d| d.is_some())
    }

    /// Minimal nonzero vectors of the family: members that are not the sum of two nonzero
    /// elements of the monoid it generates. Only vectors whose support passes `valid` count.
    pub fn minimal_vectors(
        &self,
        valid: &dyn Fn(&[usize]) -> bool,
    ) -> Result<Vec<Vec<u64>>, PairError> {
        let n = self.n();
        if self.is_split()
            && matches!(
                self.kind,
                FamilyKind::Campana | FamilyKind::Integral | FamilyKind::Darmon | FamilyKind::Kfree
            )
        {
            let mut out = Vec::new();
            for i in 0..n {
                if !valid(&[i]) {
                    continue;
                }
                let range = match (self.kind, self.m[i]) {
                    (FamilyKind::Kfree, _) => 1..=1,
                    (_, Mult::Inf) => continue,
                    (FamilyKind::Darmon, Mult::Fin(m)) => m..=m,
                    (_, Mult::Fin(m)) => m..=2 * m - 1,
                };
                for d in range {
                    let mut w = vec![0; n];
                    w[i] = d;
                    out.push(w);
                }
            }
            return Ok(out);
        }
        let (bounds, strict) = self.search_bounds()?;
        let gens = box_search(self, &bounds, valid);
        if strict {
            if let Some(g) = gens
                .iter()
                .find(|g| g.iter().zip(&bounds).any(|(x, b)| x >= b))
            {
                return Err(PairError::Family(format!(
                    "generator search did not close inside the box of side {}: found {g:?}",
                    bounds[0]
                )));
            }
        }
        Ok(gens)
    }
}

fn support(w: &[u64]) -> Vec<usize> {
    (0..w.len()).filter(|&i| w[i] > 0).collect()
}

/// Scan the box in index order; rep marks nonzero sums of generators.
fn box_search(family: &Family, bounds: &[u64], valid: &dyn Fn(&[usize]) -> bool) -> Vec<Vec<u64>> {
    let n = bounds.len();
    let radix: Vec<usize> = bounds.iter().map(|&b| b as usize + 1).collect();
    let total: usize = radix.iter().product();
    let mut rep = vec![false; total];
    let mut gens: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut v = vec![0u64; n];
    for idx in 0..total {
        if idx > 0 {
            for i in 0..n {
                v[i] += 1;
                if v[i] as usize == radix[i] {
                    v[i] = 0;
                } else {
                    break;
                }
            }
            let supp = support(&v);
            if !valid(&supp) {
                continue;
            }
            let decomposable = gens.iter().any(|(gi, g)| {
                g.iter().zip(&v).all(|(a, b)| a <= b) && *gi != idx && rep[idx - gi]
            });
            let member = family.contains(&v);
            if member && !decomposable {
                gens.push((idx, v.clone()));
            }
            rep[idx] = member || decomposable;
        }
    }
    gens.into_iter().map(|(_, g)| g).collect()
}
