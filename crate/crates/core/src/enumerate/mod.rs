//! Rational points of bounded height, M-point membership and counting series.

pub mod count;
pub mod member;

pub use count::{count_series, CountOptions};
pub use member::{is_m_point, Membership};

use crate::arith::ArithError;
use crate::pairspec::PairModel;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Largest t with t^deg ≤ b.
pub fn integer_root(b: u64, deg: u32) -> u64 {
    if deg == 1 {
        return b;
    }
    let fits = |t: u64| (t as u128).checked_pow(deg).is_some_and(|x| x <= b as u128);
    let (mut lo, mut hi) = (0u64, b.isqrt() + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// 2, 4, 8, … below `max`, then `max` itself.
pub fn doubling_grid(max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..64)
        .map(|k| 1u64 << k)
        .take_while(|&b| b < max)
        .collect();
    if max >= 1 {
        out.push(max);
    }
    out
}

pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for k in (p..=n).step_by(p) {
            if k > p {
                composite[k] = true;
            }
            mu[k] = -mu[k];
        }
        let pp = p.saturating_mul(p);
        for k in (pp..=n).step_by(pp.max(1)) {
            mu[k] = 0;
        }
    }
    mu
}

/// Primitive integral points of ℙ^{n-1} with max|x_i| ≤ t, first nonzero coordinate positive.
pub fn primitive_points(n: usize, t: u64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let t = t as i64;
    let mut x = vec![-t; n];
    loop {
        let lead = x.iter().find(|&&v| v != 0);
        if lead.is_some_and(|&v| v > 0) && x.iter().fold(0i64, |g, &v| num_integer::gcd(g, v)) == 1
        {
            out.push(x.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
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

/// Hex SHA-256 of the canonical JSON of the configuration.
pub fn config_hash(pair: &PairModel) -> String {
    let digest = Sha256::digest(pair.config.to_json().as_bytes());
    digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub name: String,
    pub config_hash: String,
    pub height_degree: u32,
    pub s: Vec<u64>,
    /// (B, N(B)) in the order requested.
    pub rows: Vec<(u64, u128)>,
}

impl CountSeries {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("B,count\n");
        for (b, c) in &self.rows {
            let _ = writeln!(s, "{b},{c}");
        }
        s
    }

    /// Parse the `B,count` table written by [`CountSeries::to_csv`].
    pub fn rows_from_csv(text: &str) -> Result<Vec<(u64, u128)>, EnumError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| EnumError::Invalid(e.to_string()))?;
            let get = |i: usize| {
                rec.get(i)
                    .map(str::trim)
                    .ok_or_else(|| EnumError::Invalid("short row".into()))
            };
            let b = get(0)?
                .parse()
                .map_err(|_| EnumError::Invalid(format!("bad bound {:?}", rec.get(0))))?;
            let c = get(1)?
                .parse()
                .map_err(|_| EnumError::Invalid(format!("bad count {:?}", rec.get(1))))?;
            rows.push((b, c));
        }
        Ok(rows)
    }
}
