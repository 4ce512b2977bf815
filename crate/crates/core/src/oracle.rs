//! Slow, independent reference computations. Only `factorize` is shared with the main path.

use crate::arith::factorize;
use crate::exactlin::linalg::Q;
use crate::pairspec::{Ambient, Atom, Family, FamilyKind, Mult, PairModel};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub const COUNT_GUARD: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("T = {0} exceeds the brute-force guard {COUNT_GUARD}")]
    Guard(u64),
    #[error("the slice is unbounded")]
    UnboundedSlice,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bad fixture: {0}")]
    Fixture(String),
}

fn fin(m: Mult) -> Option<u64> {
    match m {
        Mult::Fin(x) => Some(x),
        Mult::Inf => None,
    }
}

/// Direct evaluation of the membership rules on a finite vector.
pub fn member(f: &Family, w: &[u64]) -> bool {
    let n = w.len();
    let per_component =
        f.geometric || matches!(f.kind, FamilyKind::Custom | FamilyKind::WeakCampana);
    let mut units: BTreeMap<usize, (u64, usize)> = BTreeMap::new();
    for i in 0..n {
        let key = if per_component { i } else { f.groups[i] };
        let e = units.entry(key).or_insert((0, i));
        e.0 += w[i];
    }
    let weighted_ok = || {
        // Σ w_i/m_i over finite m_i > 1, compared against 1 with a common denominator
        let den: u128 = (0..n)
            .filter_map(|i| fin(f.m[i]).filter(|&m| m > 1))
            .fold(1u128, |a, m| a.lcm(&(m as u128)));
        let num: u128 = (0..n)
            .filter_map(|i| {
                fin(f.m[i])
                    .filter(|&m| m > 1)
                    .map(|m| w[i] as u128 * (den / m as u128))
            })
            .sum();
        num >= den
    };
    let zero = w.iter().all(|&x| x == 0);
    match f.kind {
        FamilyKind::Campana | FamilyKind::Integral => {
            units.values().all(|&(s, i)| match fin(f.m[i]) {
                None => s == 0,
                Some(m) => s == 0 || s >= m,
            })
        }
        FamilyKind::Darmon => units.values().all(|&(s, i)| match fin(f.m[i]) {
            None | Some(0) => s == 0,
            Some(m) => s % m == 0,
        }),
        FamilyKind::Kfree => units.values().all(|&(s, i)| s <= f.k[i]),
        FamilyKind::WeakCampana => {
            (0..n).all(|i| f.m[i] != Mult::Inf || w[i] == 0) && (zero || weighted_ok())
        }
        FamilyKind::Custom => {
            let clause = f.clauses.iter().any(|c| {
                c.iter().zip(w).all(|(a, &x)| match a {
                    Atom::Zero => x == 0,
                    Atom::AtLeast(k) => x >= *k,
                    Atom::Divisible(k) => *k != 0 && x % k == 0,
                    Atom::Any => true,
                })
            });
            clause && (zero || !f.global_sum || weighted_ok())
        }
    }
}

/// Members of the box that are not a sum of two nonzero elements of the monoid closure within the box.
pub fn brute_generators(f: &Family, bounds: &[u64]) -> BTreeSet<Vec<u64>> {
    let n = bounds.len();
    let mut all = Vec::new();
    let mut w = vec![0u64; n];
    'outer: loop {
        all.push(w.clone());
        for i in 0..n {
            if w[i] < bounds[i] {
                w[i] += 1;
                continue 'outer;
            }
            w[i] = 0;
        }
        break;
    }
    let members: BTreeSet<Vec<u64>> = all
        .iter()
        .filter(|v| v.iter().any(|&x| x > 0) && member(f, v))
        .cloned()
        .collect();
    let mut closure = members.clone();
    loop {
        let mut fresh = Vec::new();
        for u in &closure {
            for v in &closure {
                let s: Vec<u64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                if s.iter().zip(bounds).all(|(x, b)| x <= b) && !closure.contains(&s) {
                    fresh.push(s);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        closure.extend(fresh);
    }
    members
        .into_iter()
        .filter(|w| {
            !closure.iter().any(|u| {
                let rest: Option<Vec<u64>> =
                    w.iter().zip(u).map(|(a, b)| a.checked_sub(*b)).collect();
                rest.is_some_and(|r| r.iter().any(|&x| x > 0) && closure.contains(&r))
            })
        })
        .collect()
}

fn pow_mod(b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    let mut b = b % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// A root of x² ≡ d modulo p^k, lifted one power of p at a time by search.
fn root_mod(d: i128, p: u128, k: u32) -> Option<u128> {
    let target = |m: u128| d.rem_euclid(m as i128) as u128;
    let mut r = (0..p).find(|&x| x * x % p == target(p))?;
    let mut pk = p;
    for _ in 1..k {
        let next = pk * p;
        r = (0..p)
            .map(|t| r + t * pk)
            .find(|&x| x * x % next == target(next))?;
        pk = next;
    }
    Some(r)
}

fn val(mut x: i128, p: u128) -> u32 {
    let p = p as i128;
    let mut e = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        e += 1;
    }
    e
}

/// Valuations of x + y√d at the two places above an odd prime p split in ℚ(√d), in the order
/// (x + y·r, x − y·r) for the least root r of d modulo p; None unless p splits.
pub fn split_valuations(x: i128, y: i128, d: i64, p: u128) -> Option<(u32, u32)> {
    if p == 2 || pow_mod((d as i128).rem_euclid(p as i128) as u128, (p - 1) / 2, p) != 1 {
        return None;
    }
    let norm = x * x - d as i128 * y * y;
    let k = val(norm, p) + 1;
    let r = root_mod(d as i128, p, k)? as i128;
    let m = (p as i128).pow(k);
    let plus = (x + y * r).rem_euclid(m);
    let minus = (x - y * r).rem_euclid(m);
    let vp = if plus == 0 { k } else { val(plus, p) };
    let vm = if minus == 0 { k } else { val(minus, p) };
    Some((vp, vm))
}

struct Divisor {
    terms: Vec<(i64, Vec<u32>)>,
    first: usize,
    /// (a, b, s, d, u, v) when the two components are the factors of a binary quadratic.
    quad: Option<(i64, i64, i64, i64, usize, usize)>,
}

fn eval(terms: &[(i64, Vec<u32>)], x: &[i64]) -> i128 {
    terms
        .iter()
        .map(|(c, e)| {
            e.iter()
                .zip(x)
                .fold(*c as i128, |acc, (&k, &xi)| acc * (xi as i128).pow(k))
        })
        .sum()
}

/// Count M-points with max|x_i| ≤ t by looping over every integer tuple.
pub fn brute_count(pair: &PairModel, t: u64) -> Result<u64, OracleError> {
    if t > COUNT_GUARD {
        return Err(OracleError::Guard(t));
    }
    let Ambient::Projective(n) = pair.ambient else {
        return Err(OracleError::Unsupported("projective ambient only".into()));
    };
    let fam = &pair.family;
    let true_components = fam.geometric || fam.kind == FamilyKind::Custom;
    let mut divisors = Vec::new();
    let mut c = 0;
    for d in &pair.divisors {
        let form = d
            .form
            .as_ref()
            .ok_or_else(|| OracleError::Unsupported("divisor without a form".into()))?;
        let quad = d.quadratic.as_ref().map(|q| (q.a, q.b, q.s, q.d, q.u, q.v));
        if true_components && d.k > 1 && (quad.is_none() || d.k != 2) {
            return Err(OracleError::Unsupported(
                "component valuations need a quadratic splitting".into(),
            ));
        }
        divisors.push(Divisor {
            terms: form
                .terms
                .iter()
                .map(|t| (t.coef, t.exps.clone()))
                .collect(),
            first: c,
            quad,
        });
        c += d.k;
    }
    let ncomp = c;
    let s: BTreeSet<u128> = pair.effective_s.iter().map(|&p| p as u128).collect();
    let t = t as i64;
    let mut x = vec![-t; n];
    let mut count = 0u64;
    loop {
        let lead = x.iter().copied().find(|&v| v != 0);
        let g = x.iter().fold(0i64, |g, &v| Integer::gcd(&g, &v));
        if lead.is_some_and(|v| v > 0) && g == 1 {
            let values: Vec<i128> = divisors.iter().map(|d| eval(&d.terms, &x)).collect();
            if values.iter().all(|&v| v != 0) {
                let mut primes = BTreeSet::new();
                for &v in &values {
                    let f = factorize(v).map_err(|e| OracleError::Unsupported(e.to_string()))?;
                    primes.extend(f.factors.iter().map(|x| x.0).filter(|p| !s.contains(p)));
                }
                let ok = primes.iter().all(|&p| {
                    let mut sides = vec![vec![0u64; ncomp], vec![0u64; ncomp]];
                    for (d, &v) in divisors.iter().zip(&values) {
                        let e = val(v, p) as u64;
                        match d.quad {
                            Some((a, b, sq, dd, u, w)) if true_components && e > 0 => {
                                let xx = 2 * a as i128 * x[u] as i128 + b as i128 * x[w] as i128;
                                let yy = sq as i128 * x[w] as i128;
                                if let Some((vp, vm)) = split_valuations(xx, yy, dd, p) {
                                    let (vp, vm) = (vp as u64, vm as u64);
                                    sides[0][d.first] = vp;
                                    sides[0][d.first + 1] = vm;
                                    sides[1][d.first] = vm;
                                    sides[1][d.first + 1] = vp;
                                } else {
                                    for side in sides.iter_mut() {
                                        side[d.first] = e / 2;
                                        side[d.first + 1] = e / 2;
                                    }
                                }
                            }
                            _ => {
                                for side in sides.iter_mut() {
                                    side[d.first] = e;
                                }
                            }
                        }
                    }
                    member(fam, &sides[0]) && member(fam, &sides[1])
                });
                if ok {
                    count += 1;
                }
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(count);
            }
            k -= 1;
            if x[k] < t {
                x[k] += 1;
                break;
            }
            x[k] = -t;
        }
    }
}

/// Lattice-count estimates of the slice volume of a full-dimensional cone at scalings K and 2K.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeBracket {
    pub closed: [Q; 2],
    pub open: [Q; 2],
    pub lower: Q,
    pub upper: Q,
}

fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut prev = 1i128;
    let mut sign = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn facet_normals(rays: &[Vec<i64>], dim: usize) -> Vec<Vec<i128>> {
    if dim == 1 {
        let sgn = rays
            .iter()
            .map(|r| r[0].signum())
            .find(|&s| s != 0)
            .unwrap_or(1);
        return vec![vec![sgn as i128]];
    }
    let mut out: Vec<Vec<i128>> = Vec::new();
    let m = rays.len();
    let mut pick: Vec<usize> = (0..dim - 1).collect();
    if m < dim - 1 {
        return out;
    }
    loop {
        // generalized cross product of the chosen rays
        let normal: Vec<i128> = (0..dim)
            .map(|c| {
                let minor: Vec<Vec<i128>> = pick
                    .iter()
                    .map(|&r| {
                        (0..dim)
                            .filter(|&j| j != c)
                            .map(|j| rays[r][j] as i128)
                            .collect()
                    })
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * det(minor)
            })
            .collect();
        if normal.iter().any(|&x| x != 0) {
            let dots: Vec<i128> = rays
                .iter()
                .map(|r| r.iter().zip(&normal).map(|(&a, &b)| a as i128 * b).sum())
                .collect();
            let oriented = if dots.iter().all(|&d| d >= 0) {
                Some(normal)
            } else if dots.iter().all(|&d| d <= 0) {
                Some(normal.iter().map(|x| -x).collect())
            } else {
                None
            };
            if let Some(n) = oriented {
                let g = n.iter().fold(0i128, |g, &x| g.gcd(&x));
                let n: Vec<i128> = n.iter().map(|x| x / g).collect();
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        let mut i = dim - 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < m - (dim - 1 - i) {
                pick[i] += 1;
                for j in i + 1..dim - 1 {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Brackets the volume of {y ∈ cone : ⟨L, y⟩ = 1} by counting lattice points of the dilated region ⟨L, y⟩ ≤ k.
pub fn brute_volume(rays: &[Vec<i64>], l: &[Q], scale: u64) -> Result<VolumeBracket, OracleError> {
    let dim = l.len();
    let den = l
        .iter()
        .fold(num_bigint::BigInt::from(1), |a, x| a.lcm(x.denom()));
    let li: Vec<i128> = l
        .iter()
        .map(|x| {
            (x * Q::from_integer(den.clone()))
                .to_integer()
                .to_i128()
                .expect("small L")
        })
        .collect();
    let den = den.to_i128().expect("small denominator");
    let heights: Vec<i128> = rays
        .iter()
        .map(|r| r.iter().zip(&li).map(|(&a, &b)| a as i128 * b).sum())
        .collect();
    if rays.is_empty() || heights.iter().any(|&h| h <= 0) {
        return Err(OracleError::UnboundedSlice);
    }
    let normals = facet_normals(rays, dim);
    let estimate = |k: u64, strict: bool| -> Q {
        let top = k as i128 * den;
        let reach = rays
            .iter()
            .zip(&heights)
            .flat_map(|(r, &h)| {
                r.iter()
                    .map(move |&x| Integer::div_ceil(&(x.unsigned_abs() as i128 * top), &h))
            })
            .max()
            .unwrap_or(0) as i64;
        let mut y = vec![-reach; dim];
        let mut count: i128 = 0;
        loop {
            let lv: i128 = y.iter().zip(&li).map(|(&a, &b)| a as i128 * b).sum();
            let inside = normals.iter().all(|n| {
                let d: i128 = n.iter().zip(&y).map(|(&a, &b)| a * b as i128).sum();
                if strict {
                    d > 0
                } else {
                    d >= 0
                }
            });
            if inside && if strict { lv < top } else { lv <= top } {
                count += 1;
            }
            let mut i = dim;
            loop {
                if i == 0 {
                    return Q::new(
                        (count * dim as i128).into(),
                        (k as i128).pow(dim as u32).into(),
                    );
                }
                i -= 1;
                if y[i] < reach {
                    y[i] += 1;
                    break;
                }
                y[i] = -reach;
            }
        }
    };
    let closed = [estimate(scale, false), estimate(2 * scale, false)];
    let open = [estimate(scale, true), estimate(2 * scale, true)];
    let lower = open.iter().min().cloned().expect("two");
    let upper = closed.iter().max().cloned().expect("two");
    Ok(VolumeBracket {
        closed,
        open,
        lower,
        upper,
    })
}

/// A recorded oracle output, stored as `key: value` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenFixture {
    pub config_hash: String,
    pub operation: String,
    pub input: String,
    pub output: String,
    pub note: String,
}

impl GoldenFixture {
    pub fn to_text(&self) -> String {
        format!(
            "config_hash: {}\noperation: {}\ninput: {}\noutput: {}\nnote: {}\n",
            self.config_hash, self.operation, self.input, self.output, self.note
        )
    }

    pub fn parse(text: &str) -> Result<GoldenFixture, OracleError> {
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| OracleError::Fixture(format!("no key in {line:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(|s| s.to_string())
                .ok_or_else(|| OracleError::Fixture(format!("missing {k}")))
        };
        Ok(GoldenFixture {
            config_hash: get("config_hash")?,
            operation: get("operation")?,
            input: get("input")?,
            output: get("output")?,
            note: get("note")?,
        })
    }
}

/// Sign-insensitive check that a rational lies in a closed interval.
pub fn brackets(b: &VolumeBracket, v: &Q) -> bool {
    !v.is_negative() && &b.lower <= v && v <= &b.upper && !b.upper.is_zero()
}
