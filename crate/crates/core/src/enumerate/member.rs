use super::EnumError;
use crate::arith::{component_valuations, factorize, valuation_vector, Behavior, QuadraticPlace};
use crate::pairspec::{Ambient, FamilyKind, Form, PairModel, Splitting};
use dashmap::DashMap;

const TABLE: usize = 128;

/// Membership test for points of a projective pair, with per-divisor shortcuts when they apply.
pub struct Membership<'a> {
    pub pair: &'a PairModel,
    pub forms: Vec<Form>,
    pub nvars: usize,
    first: Vec<usize>,
    quadratic: Vec<Option<crate::pairspec::QuadraticData>>,
    true_components: bool,
    /// Membership is a conjunction of conditions on single divisor values.
    pub separable: bool,
    allowed: Vec<Vec<bool>>,
    places: DashMap<u64, QuadraticPlace>,
}

impl<'a> Membership<'a> {
    pub fn new(pair: &'a PairModel) -> Result<Self, EnumError> {
        let Ambient::Projective(nvars) = pair.ambient else {
            return Err(EnumError::Unsupported(
                "point enumeration needs a projective ambient space".into(),
            ));
        };
        let mut forms = Vec::new();
        let mut first = Vec::new();
        let mut quadratic = Vec::new();
        let mut c = 0;
        let true_components = pair.family.geometric || pair.family.kind == FamilyKind::Custom;
        let mut d_seen = None;
        for d in &pair.divisors {
            forms.push(d.form.clone().ok_or_else(|| {
                EnumError::Unsupported(format!("divisor {} has no form", d.name))
            })?);
            first.push(c);
            c += d.k;
            if true_components && d.k > 1 {
                match (&d.splitting, &d.quadratic) {
                    (Splitting::Quadratic(dd), Some(_)) => {
                        if d_seen.is_some_and(|x| x != *dd) {
                            return Err(EnumError::Unsupported(
                                "component valuations over several quadratic fields".into(),
                            ));
                        }
                        d_seen = Some(*dd);
                    }
                    _ => {
                        return Err(EnumError::Unsupported(format!(
                            "component valuations of {} need a quadratic splitting",
                            d.name
                        )))
                    }
                }
            }
            quadratic.push(d.quadratic.clone());
        }
        let separable = !true_components
            && (matches!(
                pair.family.kind,
                FamilyKind::Campana | FamilyKind::Darmon | FamilyKind::Kfree | FamilyKind::Integral
            ) || pair.divisors.len() == 1);
        let n = pair.n();
        let allowed = first
            .iter()
            .map(|&i| {
                (0..TABLE)
                    .map(|e| {
                        let mut w = vec![0u64; n];
                        w[i] = e as u64;
                        pair.family.contains(&w)
                    })
                    .collect()
            })
            .collect();
        Ok(Membership {
            pair,
            forms,
            nvars,
            first,
            quadratic,
            true_components,
            separable,
            allowed,
            places: DashMap::new(),
        })
    }

    /// Whether exponent e of a prime outside S is allowed in the value of divisor j, all other values being units.
    pub fn allowed(&self, j: usize, e: u32) -> bool {
        match self.allowed[j].get(e as usize) {
            Some(&b) => b,
            None => {
                let mut w = vec![0u64; self.pair.n()];
                w[self.first[j]] = e as u64;
                self.pair.family.contains(&w)
            }
        }
    }

    pub fn s(&self) -> &[u64] {
        &self.pair.effective_s
    }

    /// For separable families: whether the value of divisor j passes its condition at every prime outside S.
    pub fn value_admissible(&self, j: usize, value: i128) -> Result<bool, EnumError> {
        if value == 0 {
            return Ok(false);
        }
        let f = factorize(value)?;
        Ok(f.factors
            .iter()
            .all(|&(p, e)| self.s().iter().any(|&q| q as u128 == p) || self.allowed(j, e)))
    }

    fn place(&self, p: u64, d: i64) -> Result<QuadraticPlace, EnumError> {
        if let Some(pl) = self.places.get(&p) {
            return Ok(*pl);
        }
        let supplied = self
            .pair
            .config
            .prime_elements
            .iter()
            .find(|e| e.p == p && e.d == d)
            .map(|e| (e.x, e.y));
        let pl = QuadraticPlace::new(p, d, supplied)?;
        self.places.insert(p, pl);
        Ok(pl)
    }

    fn check_prime(&self, p: u128, vals: &[u32], point: &[i64]) -> Result<bool, EnumError> {
        let n = self.pair.n();
        if !self.true_components {
            let mut w = vec![0u64; n];
            for (j, &v) in vals.iter().enumerate() {
                w[self.first[j]] += v as u64;
            }
            return Ok(self.pair.family.contains(&w));
        }
        let mut sides = [vec![0u64; n], vec![0u64; n]];
        let mut two_places = false;
        for (j, &v) in vals.iter().enumerate() {
            let i = self.first[j];
            match &self.quadratic[j] {
                Some(q) if self.pair.divisors[j].k == 2 => {
                    if v == 0 {
                        continue;
                    }
                    let p64 = u64::try_from(p)
                        .map_err(|_| EnumError::Unsupported("prime beyond 64 bits".into()))?;
                    let place = self.place(p64, q.d)?;
                    if matches!(place.behavior, Behavior::Split { .. }) {
                        two_places = true;
                    }
                    let Some([x, y]) = component_valuations(point, q, &place, self.s())? else {
                        continue;
                    };
                    sides[0][i] = x.0 as u64;
                    sides[0][i + 1] = x.1 as u64;
                    sides[1][i] = y.0 as u64;
                    sides[1][i + 1] = y.1 as u64;
                }
                _ => {
                    sides[0][i] = v as u64;
                    sides[1][i] = v as u64;
                }
            }
        }
        let fam = &self.pair.family;
        Ok(fam.contains(&sides[0]) && (!two_places || fam.contains(&sides[1])))
    }

    /// The full test on a primitive point: not on the boundary, and in M at every prime outside S.
    pub fn contains(&self, point: &[i64]) -> Result<bool, EnumError> {
        if point.len() != self.nvars {
            return Err(EnumError::Invalid(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.nvars
            )));
        }
        let profile = valuation_vector(point, &self.forms, self.s())?;
        if profile.boundary {
            return Ok(false);
        }
        for (p, vals) in &profile.primes {
            if !self.check_prime(*p, vals, point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Whether a primitive integral point is an M-point of the pair.
pub fn is_m_point(point: &[i64], pair: &PairModel) -> Result<bool, EnumError> {
    Membership::new(pair)?.contains(point)
}
