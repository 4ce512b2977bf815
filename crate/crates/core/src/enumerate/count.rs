use super::member::Membership;
use super::{integer_root, mobius_table, CountSeries, EnumError};
use crate::arith::factor::primes_up_to;
use crate::arith::factorize;
use crate::pairspec::{Form, PairModel};
use rayon::prelude::*;

const BITSET_LIMIT: u64 = 1 << 28;
const SPARSE_LIMIT: u64 = 1 << 62;

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub chunks: usize,
    pub threads: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            chunks: 64,
            threads: rayon::current_num_threads(),
        }
    }
}

struct Compiled {
    terms: Vec<(i128, Vec<(usize, u32)>)>,
}

impl Compiled {
    fn new(f: &Form) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|t| {
                (
                    t.coef as i128,
                    t.exps
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i, e))
                        .collect(),
                )
            })
            .collect();
        Compiled { terms }
    }

    #[inline]
    fn eval(&self, x: &[i64]) -> Option<i128> {
        let mut total: i128 = 0;
        for (c, mono) in &self.terms {
            let mut m = *c;
            for &(i, e) in mono {
                for _ in 0..e {
                    m = m.checked_mul(x[i] as i128)?;
                }
            }
            total = total.checked_add(m)?;
        }
        Some(total)
    }

    fn bound(&self, t: u64) -> Option<u64> {
        let mut total: u128 = 0;
        for (c, mono) in &self.terms {
            let d: u32 = mono.iter().map(|x| x.1).sum();
            let tp = (t as u128).checked_pow(d)?;
            total = total.checked_add(c.unsigned_abs().checked_mul(tp)?)?;
        }
        u64::try_from(total).ok()
    }
}

/// Values whose exponents outside S are all allowed, for one divisor.
enum Admissible {
    Bits(Vec<u64>),
    Sorted(Vec<u64>),
    Factor,
}

struct ValueTest {
    set: Admissible,
    strip: Vec<u64>,
}

impl ValueTest {
    fn build(m: &Membership, j: usize, max: Option<u64>) -> ValueTest {
        let strip: Vec<u64> = m.s().to_vec();
        let set = match max {
            Some(x) if !m.allowed(j, 1) && x <= SPARSE_LIMIT => {
                let mut out = Vec::new();
                let primes: Vec<u64> = primes_up_to(x.isqrt() as usize)
                    .into_iter()
                    .filter(|p| !strip.contains(p))
                    .collect();
                sparse_values(m, j, &primes, 0, 1, x, &mut out);
                if x <= BITSET_LIMIT {
                    let mut bits = vec![0u64; (x as usize >> 6) + 1];
                    for v in out {
                        bits[(v >> 6) as usize] |= 1 << (v & 63);
                    }
                    Admissible::Bits(bits)
                } else {
                    out.sort_unstable();
                    Admissible::Sorted(out)
                }
            }
            _ => Admissible::Factor,
        };
        ValueTest { set, strip }
    }

    #[inline]
    fn test(&self, m: &Membership, j: usize, value: i128) -> Result<bool, EnumError> {
        if value == 0 {
            return Ok(false);
        }
        let mut v = value.unsigned_abs();
        let lookup = |v: u128| -> Option<bool> {
            match &self.set {
                Admissible::Bits(b) => Some(
                    b.get((v >> 6) as usize)
                        .is_some_and(|w| w >> (v & 63) & 1 == 1),
                ),
                Admissible::Sorted(s) => {
                    Some(u64::try_from(v).is_ok_and(|x| s.binary_search(&x).is_ok()))
                }
                Admissible::Factor => None,
            }
        };
        if matches!(self.set, Admissible::Factor) {
            return m.value_admissible(j, value);
        }
        for &p in &self.strip {
            if p == 2 {
                v >>= v.trailing_zeros();
            } else {
                while v % p as u128 == 0 {
                    v /= p as u128;
                }
            }
        }
        Ok(lookup(v).unwrap_or(false))
    }
}

fn sparse_values(
    m: &Membership,
    j: usize,
    primes: &[u64],
    from: usize,
    cur: u64,
    max: u64,
    out: &mut Vec<u64>,
) {
    out.push(cur);
    for (i, &p) in primes.iter().enumerate().skip(from) {
        let Some(pp) = p.checked_mul(p) else { break };
        if pp > max / cur {
            break;
        }
        let mut pe = p;
        let mut e = 1;
        while pe <= max / cur / p {
            pe *= p;
            e += 1;
            if m.allowed(j, e) {
                sparse_values(m, j, primes, i + 1, cur * pe, max, out);
            }
        }
    }
}

fn squarefree_divisor_terms(g: u64) -> Vec<(u64, i32)> {
    let mut out = vec![(1u64, 1i32)];
    if g <= 1 {
        return out;
    }
    let f = factorize(g as i128).expect("nonzero");
    for (p, _) in f.factors {
        let n = out.len();
        for k in 0..n {
            out.push((out[k].0 * p as u64, -out[k].1));
        }
    }
    out
}

/// #{y ∈ [−t, t]^k : gcd(g, y) = 1}
fn coprime_box(terms: &[(u64, i32)], t: u64, k: u32) -> i128 {
    terms
        .iter()
        .map(|&(d, s)| s as i128 * ((2 * (t / d) + 1) as i128).pow(k))
        .sum()
}

struct Plan<'m, 'a> {
    m: &'m Membership<'a>,
    used: Vec<usize>,
    lists: Vec<Vec<i64>>,
    rest: Vec<usize>,
    tests: Vec<Option<ValueTest>>,
    compiled: Vec<Compiled>,
    free: u32,
    tb: Vec<u64>,
}

impl Plan<'_, '_> {
    fn run_chunk(&self, lead: &[i64]) -> Result<Vec<i128>, EnumError> {
        let r = self.used.len();
        let mut acc = vec![0i128; self.tb.len()];
        let mut point = vec![0i64; self.m.nvars];
        let mut idx = vec![0usize; r];
        for &v0 in lead {
            point[self.used[0]] = v0;
            if r > 1 && self.lists[1..].iter().any(|l| l.is_empty()) {
                continue;
            }
            idx.iter_mut().for_each(|x| *x = 0);
            loop {
                for k in 1..r {
                    point[self.used[k]] = self.lists[k][idx[k]];
                }
                if self.canonical(&point) {
                    self.visit(&point, &mut acc)?;
                }
                let mut k = r;
                loop {
                    k -= 1;
                    if k == 0 {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < self.lists[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if k == 0 {
                    break;
                }
            }
        }
        Ok(acc)
    }

    #[inline]
    fn canonical(&self, point: &[i64]) -> bool {
        self.used
            .iter()
            .map(|&u| point[u])
            .find(|&x| x != 0)
            .is_some_and(|x| x > 0)
    }

    #[inline]
    fn visit(&self, point: &[i64], acc: &mut [i128]) -> Result<(), EnumError> {
        if self.m.separable {
            for &j in &self.rest {
                let v = self.compiled[j]
                    .eval(point)
                    .ok_or(crate::arith::ArithError::Overflow)?;
                if !self.tests[j]
                    .as_ref()
                    .expect("value test")
                    .test(self.m, j, v)?
                {
                    return Ok(());
                }
            }
        } else if !self.m.contains(point)? {
            return Ok(());
        }
        let mut g = 0u64;
        let mut top = 0u64;
        for &u in &self.used {
            let a = point[u].unsigned_abs();
            g = num_integer::gcd(g, a);
            top = top.max(a);
        }
        if self.free == 0 {
            if g == 1 {
                for (b, &t) in self.tb.iter().enumerate() {
                    if top <= t {
                        acc[b] += 1;
                    }
                }
            }
            return Ok(());
        }
        let terms = squarefree_divisor_terms(g);
        for (b, &t) in self.tb.iter().enumerate() {
            if top <= t {
                acc[b] += coprime_box(&terms, t, self.free);
            }
        }
        Ok(())
    }
}

fn classical(n: usize, tb: &[u64]) -> Vec<i128> {
    let t = tb.iter().copied().max().unwrap_or(0);
    let mu = mobius_table(t as usize);
    tb.iter()
        .map(|&t| {
            let total: i128 = (1..=t)
                .map(|d| mu[d as usize] as i128 * (((2 * (t / d) + 1) as i128).pow(n as u32) - 1))
                .sum();
            total / 2
        })
        .collect()
}

/// N(B) = #{M-points of height max|x_i|^deg ≤ B} for each bound.
pub fn count_series(
    pair: &PairModel,
    bounds: &[u64],
    opts: CountOptions,
) -> Result<CountSeries, EnumError> {
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EnumError::Invalid(
            "bounds must be strictly increasing".into(),
        ));
    }
    let m = Membership::new(pair)?;
    let deg = pair.height_degree;
    let tb: Vec<u64> = bounds.iter().map(|&b| integer_root(b, deg)).collect();
    let t = tb.iter().copied().max().unwrap_or(0);
    if t > i64::MAX as u64 / 4 {
        return Err(EnumError::Invalid("height bound too large".into()));
    }
    let n = m.nvars;
    let mut used: Vec<usize> = m.forms.iter().flat_map(|f| f.variables()).collect();
    used.sort_unstable();
    used.dedup();
    let counts = if used.is_empty() {
        classical(n, &tb)
    } else {
        let compiled: Vec<Compiled> = m.forms.iter().map(Compiled::new).collect();
        let coordinate_of = |f: &Form| -> Option<(usize, i64)> {
            let c = f.linear_coefficients()?;
            let nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0).collect();
            (nz.len() == 1).then(|| (nz[0], c[nz[0]]))
        };
        let coords: Vec<Option<(usize, i64)>> = m.forms.iter().map(coordinate_of).collect();
        let tests: Vec<Option<ValueTest>> = if m.separable {
            (0..m.forms.len())
                .map(|j| Some(ValueTest::build(&m, j, compiled[j].bound(t))))
                .collect()
        } else {
            (0..m.forms.len()).map(|_| None).collect()
        };
        let mut lists = Vec::new();
        for &u in &used {
            let on: Vec<(usize, i64)> = coords
                .iter()
                .enumerate()
                .filter_map(|(j, c)| c.filter(|c| c.0 == u).map(|c| (j, c.1)))
                .collect();
            let mut list = Vec::new();
            for v in 1..=t as i64 {
                let mut ok = true;
                if m.separable {
                    for &(j, c) in &on {
                        if !tests[j].as_ref().expect("value test").test(
                            &m,
                            j,
                            c as i128 * v as i128,
                        )? {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    list.push(v);
                }
            }
            let mut full: Vec<i64> = list.iter().rev().map(|v| -v).collect();
            if on.is_empty() {
                full.push(0);
            }
            full.extend(&list);
            lists.push(full);
        }
        let rest: Vec<usize> = (0..m.forms.len())
            .filter(|&j| !m.separable || coords[j].is_none())
            .collect();
        let plan = Plan {
            m: &m,
            used: used.clone(),
            lists,
            rest,
            tests,
            compiled,
            free: (n - used.len()) as u32,
            tb: tb.clone(),
        };
        let lead: Vec<i64> = plan.lists[0].iter().copied().filter(|&v| v >= 0).collect();
        let chunks = opts.chunks.max(1).min(lead.len().max(1));
        let size = lead.len().div_ceil(chunks).max(1);
        let pieces: Vec<&[i64]> = lead.chunks(size).collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads.max(1))
            .build()
            .map_err(|e| EnumError::Invalid(e.to_string()))?;
        let parts: Vec<Vec<i128>> = pool.install(|| {
            pieces
                .par_iter()
                .map(|c| plan.run_chunk(c))
                .collect::<Result<_, _>>()
        })?;
        let mut total = vec![0i128; tb.len()];
        for p in parts {
            for (a, b) in total.iter_mut().zip(p) {
                *a += b;
            }
        }
        total
    };
    let rows = bounds
        .iter()
        .zip(&counts)
        .map(|(&b, &c)| {
            u128::try_from(c)
                .map(|c| (b, c))
                .map_err(|_| EnumError::Inconsistent("negative count".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CountSeries {
        name: pair.name.clone(),
        config_hash: super::config_hash(pair),
        height_degree: deg,
        s: pair.effective_s.clone(),
        rows,
    })
}
