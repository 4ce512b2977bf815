//! Homogeneous integer forms in variables x0, x1, ...

use super::PairError;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: i64,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub nvars: usize,
    /// Nonzero terms with distinct exponent vectors, sorted descending.
    pub terms: Vec<Term>,
}

fn parse_err(s: &str, why: &str) -> PairError {
    PairError::Form(format!("{why} in `{s}`"))
}

impl Form {
    pub fn parse(src: &str, nvars: usize) -> Result<Form, PairError> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(parse_err(src, "empty form"));
        }
        let mut terms: Vec<Term> = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(parse_err(src, "expected + or -"));
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let body = &s[start..i];
            if body.is_empty() {
                return Err(parse_err(src, "dangling sign"));
            }
            let mut coef = sign;
            let mut exps = vec![0u32; nvars];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(parse_err(src, "empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, e) = match rest.split_once('^') {
                        Some((a, b)) => (
                            a,
                            b.parse::<u32>()
                                .map_err(|_| parse_err(src, "bad exponent"))?,
                        ),
                        None => (rest, 1),
                    };
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| parse_err(src, "bad variable index"))?;
                    if idx >= nvars {
                        return Err(parse_err(src, "variable out of range"));
                    }
                    exps[idx] += e;
                } else {
                    let c: i64 = factor
                        .parse()
                        .map_err(|_| parse_err(src, "bad coefficient"))?;
                    coef = coef
                        .checked_mul(c)
                        .ok_or_else(|| parse_err(src, "coefficient overflow"))?;
                }
            }
            match terms.iter_mut().find(|t| t.exps == exps) {
                Some(t) => t.coef += coef,
                None => terms.push(Term { coef, exps }),
            }
        }
        terms.retain(|t| t.coef != 0);
        terms.sort_by(|a, b| b.exps.cmp(&a.exps));
        if terms.is_empty() {
            return Err(parse_err(src, "zero form"));
        }
        Ok(Form { nvars, terms })
    }

    pub fn linear(coefs: &[i64]) -> Form {
        let n = coefs.len();
        let mut terms: Vec<Term> = coefs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let mut exps = vec![0; n];
                exps[i] = 1;
                Term { coef: c, exps }
            })
            .collect();
        terms.sort_by(|a, b| b.exps.cmp(&a.exps));
        Form { nvars: n, terms }
    }

    /// Degree if homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let d = self.terms[0].exps.iter().sum::<u32>();
        self.terms
            .iter()
            .all(|t| t.exps.iter().sum::<u32>() == d)
            .then_some(d)
    }

    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.iter().any(|t| t.exps[i] > 0))
            .collect()
    }

    /// Coefficient vector of a linear form.
    pub fn linear_coefficients(&self) -> Option<Vec<i64>> {
        if self.degree() != Some(1) {
            return None;
        }
        let mut c = vec![0; self.nvars];
        for t in &self.terms {
            let i = t.exps.iter().position(|&e| e == 1)?;
            c[i] = t.coef;
        }
        Some(c)
    }

    /// (u, v, a, b, c) with the form equal to a u^2 + b u v + c v^2, u < v.
    pub fn binary_quadratic(&self) -> Option<(usize, usize, i64, i64, i64)> {
        if self.degree() != Some(2) {
            return None;
        }
        let vars = self.variables();
        if vars.len() != 2 {
            return None;
        }
        let (u, v) = (vars[0], vars[1]);
        let (mut a, mut b, mut c) = (0, 0, 0);
        for t in &self.terms {
            match (t.exps[u], t.exps[v]) {
                (2, 0) => a = t.coef,
                (1, 1) => b = t.coef,
                (0, 2) => c = t.coef,
                _ => return None,
            }
        }
        Some((u, v, a, b, c))
    }

    pub fn eval(&self, x: &[i64]) -> Option<i128> {
        let mut total: i128 = 0;
        for t in &self.terms {
            let mut m: i128 = t.coef as i128;
            for (xi, &e) in x.iter().zip(&t.exps) {
                for _ in 0..e {
                    m = m.checked_mul(*xi as i128)?;
                }
            }
            total = total.checked_add(m)?;
        }
        Some(total)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let mono: Vec<String> = t
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{i}")
                    } else {
                        format!("x{i}^{e}")
                    }
                })
                .collect();
            let c = t.coef.abs();
            let sign = if t.coef < 0 { "-" } else { "+" };
            if k == 0 {
                if t.coef < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (c, mono.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", mono.join("*"))?,
                (_, false) => write!(f, "{c}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}
