use super::ArithError;
use dashmap::DashMap;
use std::sync::{Arc, OnceLock};

/// Largest input accepted: the Miller-Rabin witness set below is deterministic up to here.
pub const MAX_INPUT: u128 = 3_317_044_064_679_887_385_961_981;
const CACHE_CAP: usize = 1 << 20;
const SPF_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    /// (prime, exponent) with primes strictly increasing.
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn exponent(&self, p: u128) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| *q == p)
            .map_or(0, |(_, e)| *e)
    }

    pub fn value(&self) -> i128 {
        let v = self
            .factors
            .iter()
            .fold(1i128, |acc, &(p, e)| acc * (p as i128).pow(e));
        v * self.sign as i128
    }
}

pub fn trial_bound() -> u64 {
    static B: OnceLock<u64> = OnceLock::new();
    *B.get_or_init(|| {
        std::env::var("MPOINTS_FACTOR_BOUND")
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|&b| b >= 2)
            .unwrap_or(1 << 16)
    })
}

fn small_primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(trial_bound() as usize))
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn spf_table() -> &'static [u32] {
    static T: OnceLock<Vec<u32>> = OnceLock::new();
    T.get_or_init(|| {
        let mut spf = vec![0u32; SPF_LIMIT + 1];
        for i in 2..=SPF_LIMIT {
            if spf[i] == 0 {
                let mut j = i;
                while j <= SPF_LIMIT {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    })
}

fn cache() -> &'static DashMap<u128, Arc<Vec<(u128, u32)>>> {
    static C: OnceLock<DashMap<u128, Arc<Vec<(u128, u32)>>>> = OnceLock::new();
    C.get_or_init(DashMap::new)
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    let (mut a, mut b, mut r) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = if r >= m - a { r - (m - a) } else { r + a };
        }
        a = if a >= m - a { a - (m - a) } else { a + a };
        b >>= 1;
    }
    r
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    const W: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &p in &W {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &W {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of an odd composite n (Brent's variant of rho).
fn rho(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u128, 2u128, 1u128, 1u128);
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn factor_abs(mut n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    if n <= SPF_LIMIT as u128 {
        let spf = spf_table();
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u128, e));
        }
        return out;
    }
    let bound = trial_bound() as u128;
    for &p in small_primes() {
        let p = p as u128;
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if n < bound * bound {
            out.push((n, 1));
        } else {
            let mut ps = Vec::new();
            split_large(n, &mut ps);
            ps.sort();
            for p in ps {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    out.sort();
    out
}

/// Complete factorization of a nonzero integer.
pub fn factorize(n: i128) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let a = n.unsigned_abs();
    if a > MAX_INPUT {
        return Err(ArithError::TooLarge(a));
    }
    let sign = if n < 0 { -1 } else { 1 };
    if a <= SPF_LIMIT as u128 {
        return Ok(Factorization {
            sign,
            factors: factor_abs(a),
        });
    }
    let c = cache();
    if let Some(f) = c.get(&a) {
        return Ok(Factorization {
            sign,
            factors: f.as_ref().clone(),
        });
    }
    let f = factor_abs(a);
    if c.len() < CACHE_CAP {
        c.entry(a).or_insert_with(|| Arc::new(f.clone()));
    }
    Ok(Factorization { sign, factors: f })
}

pub fn valuation(mut n: i128, p: u128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let p = p as i128;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}
