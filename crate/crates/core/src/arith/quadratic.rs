use super::ArithError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Behavior {
    /// Prime element a + b√d of norm ±p.
    Split {
        a: i64,
        b: i64,
    },
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticPlace {
    pub p: u64,
    pub d: i64,
    pub behavior: Behavior,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m as u128;
        }
        b128 = b128 * b128 % m as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

fn legendre(d: i64, p: u64) -> i64 {
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Solve a^2 - d b^2 = p for d < 0 by search.
fn find_prime_element(p: u64, d: i64) -> Option<(i64, i64)> {
    let nd = (-d) as u64;
    let mut b = 0u64;
    while nd * b * b <= p {
        let rest = p - nd * b * b;
        let a = num_integer::Roots::sqrt(&rest);
        if a * a == rest {
            return Some((a as i64, b as i64));
        }
        b += 1;
    }
    None
}

impl QuadraticPlace {
    /// The place data at p in ℚ(√d); split primes need an explicit prime element when d > 0.
    pub fn new(p: u64, d: i64, supplied: Option<(i64, i64)>) -> Result<Self, ArithError> {
        if p == 2 || (d % p as i64) == 0 {
            return Ok(QuadraticPlace {
                p,
                d,
                behavior: Behavior::Ramified,
            });
        }
        let behavior = match legendre(d, p) {
            1 => {
                let (a, b) = match supplied {
                    Some(pi) => pi,
                    None if d < 0 => {
                        find_prime_element(p, d).ok_or(ArithError::NoPrimeElement { p, d })?
                    }
                    None => return Err(ArithError::NoPrimeElement { p, d }),
                };
                let norm = a as i128 * a as i128 - d as i128 * b as i128 * b as i128;
                if norm.unsigned_abs() != p as u128 {
                    return Err(ArithError::NoPrimeElement { p, d });
                }
                Behavior::Split { a, b }
            }
            _ => Behavior::Inert,
        };
        Ok(QuadraticPlace { p, d, behavior })
    }
}

/// Number of times a + b√d divides x + y√d in ℤ[√d].
fn divide_out(mut x: i128, mut y: i128, a: i128, b: i128, d: i128) -> u32 {
    let n = a * a - d * b * b;
    if x == 0 && y == 0 {
        return u32::MAX;
    }
    let mut e = 0;
    loop {
        // (x + y√d)(a - b√d) / n
        let re = x * a - d * y * b;
        let im = y * a - x * b;
        if re % n != 0 || im % n != 0 {
            return e;
        }
        x = re / n;
        y = im / n;
        e += 1;
    }
}

/// Valuations of x + y√d at the two places above p; None when p is ramified and exempt.
pub fn quadratic_valuations(
    x: i64,
    y: i64,
    place: &QuadraticPlace,
    exempt: &[u64],
) -> Result<Option<(u32, u32)>, ArithError> {
    let d = place.d as i128;
    match place.behavior {
        Behavior::Split { a, b } => {
            let v1 = divide_out(x as i128, y as i128, a as i128, b as i128, d);
            let v2 = divide_out(x as i128, y as i128, a as i128, -(b as i128), d);
            Ok(Some((v1, v2)))
        }
        Behavior::Inert => {
            let norm = x as i128 * x as i128 - d * y as i128 * y as i128;
            let v = super::factor::valuation(norm, place.p as u128);
            Ok(Some((v / 2, v / 2)))
        }
        Behavior::Ramified => {
            if exempt.contains(&place.p) {
                Ok(None)
            } else {
                Err(ArithError::Ramified(place.p))
            }
        }
    }
}

/// Square root of d modulo p^k (p odd, d a unit square mod p) by Hensel lifting.
pub fn sqrt_mod_prime_power(d: i64, p: u64, k: u32) -> Option<u128> {
    let p128 = p as u128;
    let dm = d.rem_euclid(p as i64) as u64;
    let r0 = (0..p).find(|&r| (r as u128 * r as u128) % p128 == dm as u128)? as u128;
    if r0 == 0 {
        return None;
    }
    let mut r = r0;
    let mut modulus = p128;
    for _ in 1..k {
        let next = modulus * p128;
        let dn = (d as i128).rem_euclid(next as i128) as u128;
        // r' = r - (r^2 - d) / (2r) mod next
        let f = (r * r % next + next - dn) % next;
        let inv = mod_inverse((2 * r) % next, next)?;
        r = (r + next - f * inv % next) % next;
        modulus = next;
    }
    Some(r)
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    (r == 1).then(|| t.rem_euclid(m as i128) as u128)
}

/// Independent route: v at the place where √d ≡ root, via x + y·root mod p^k.
pub fn split_valuations_by_root(
    x: i64,
    y: i64,
    d: i64,
    p: u64,
    root_sign: i64,
    max: u32,
) -> Option<u32> {
    let r = sqrt_mod_prime_power(d, p, max + 1)?;
    let mut e = 0;
    let mut modulus = p as u128;
    for _ in 0..=max {
        let m = modulus as i128;
        let rr = if root_sign > 0 {
            r as i128
        } else {
            m - r as i128
        };
        let val = (x as i128 + y as i128 * rr).rem_euclid(m);
        if val != 0 {
            return Some(e);
        }
        e += 1;
        modulus *= p as u128;
    }
    Some(e)
}
