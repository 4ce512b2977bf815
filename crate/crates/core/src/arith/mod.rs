//! Factorization, valuation vectors of form values and valuations in quadratic orders.

pub mod factor;
pub mod quadratic;

pub use factor::{factorize, is_prime, valuation, Factorization};
pub use quadratic::{quadratic_valuations, Behavior, QuadraticPlace};

use crate::pairspec::{Form, QuadraticData};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("cannot factor zero")]
    Zero,
    #[error("{0} exceeds the certified primality range")]
    TooLarge(u128),
    #[error("prime {0} ramifies and is not exempt")]
    Ramified(u64),
    #[error("no prime element of norm ±{p} known in Q(sqrt {d})")]
    NoPrimeElement { p: u64, d: i64 },
    #[error("form value overflows at the given point")]
    Overflow,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiplicityProfile {
    /// prime → valuation of each form; only primes outside S dividing some value.
    pub primes: BTreeMap<u128, Vec<u32>>,
    pub boundary: bool,
}

/// p-adic valuations of the form values at a primitive point, dropping primes in `s`.
pub fn valuation_vector(
    point: &[i64],
    forms: &[Form],
    s: &[u64],
) -> Result<MultiplicityProfile, ArithError> {
    let mut values = Vec::with_capacity(forms.len());
    for f in forms {
        let v = f.eval(point).ok_or(ArithError::Overflow)?;
        if v == 0 {
            return Ok(MultiplicityProfile {
                primes: BTreeMap::new(),
                boundary: true,
            });
        }
        values.push(v);
    }
    let mut primes: BTreeMap<u128, Vec<u32>> = BTreeMap::new();
    for (j, &v) in values.iter().enumerate() {
        for (p, e) in factorize(v)?.factors {
            if s.iter().any(|&q| q as u128 == p) {
                continue;
            }
            primes.entry(p).or_insert_with(|| vec![0; forms.len()])[j] = e;
        }
    }
    Ok(MultiplicityProfile {
        primes,
        boundary: false,
    })
}

/// The linear factor 2a·u + (b + s√d)·v of a split binary quadratic, as X + Y√d.
pub fn split_factor(point: &[i64], q: &QuadraticData) -> Option<(i64, i64)> {
    let x = (2 * q.a as i128) * point[q.u] as i128 + q.b as i128 * point[q.v] as i128;
    let y = q.s as i128 * point[q.v] as i128;
    Some((i64::try_from(x).ok()?, i64::try_from(y).ok()?))
}

/// Valuations of the two geometric components at the two places above p,
/// returned as [(v_π(L+), v_π(L−)), (v_π̄(L+), v_π̄(L−))].
pub fn component_valuations(
    point: &[i64],
    q: &QuadraticData,
    place: &QuadraticPlace,
    exempt: &[u64],
) -> Result<Option<[(u32, u32); 2]>, ArithError> {
    let (x, y) = split_factor(point, q).ok_or(ArithError::Overflow)?;
    Ok(quadratic_valuations(x, y, place, exempt)?.map(|(a, b)| [(a, b), (b, a)]))
}
