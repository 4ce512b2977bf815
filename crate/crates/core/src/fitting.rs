//! Least-squares fits of N(B) ≈ c·B^a·(log B)^(b−1).

use crate::enumerate::CountSeries;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {need} samples with B ≥ 3 and N > 0, have {have}")]
    TooFewSamples { need: usize, have: usize },
    #[error("bounds span fewer than 3 doublings")]
    NarrowRange,
    #[error("degenerate design matrix")]
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitMode {
    Free,
    FixedA(f64),
    /// Fixes b (not b − 1).
    FixedB(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub log_c: f64,
    pub a_hat: f64,
    pub b_minus1_hat: f64,
    pub a_fixed: bool,
    pub b_fixed: bool,
    pub residual: f64,
    /// Standard errors of (log c, a, b − 1); zero for fixed parameters.
    pub std_err: [f64; 3],
    pub samples: usize,
    /// Samples dropped because B < 3 or N = 0.
    pub dropped: usize,
}

/// (B, N) pairs from a count series.
pub fn samples(series: &CountSeries) -> Vec<(f64, f64)> {
    series
        .rows
        .iter()
        .map(|&(b, n)| (b as f64, n as f64))
        .collect()
}

/// The samples with B within the last `doublings` doublings of the largest bound.
pub fn tail(data: &[(f64, f64)], doublings: u32) -> Vec<(f64, f64)> {
    let top = data.iter().map(|p| p.0).fold(0.0, f64::max);
    let cut = top / 2f64.powi(doublings as i32);
    data.iter().copied().filter(|p| p.0 >= cut).collect()
}

/// Number of doublings spanned by the usable bounds.
pub fn span_doublings(data: &[(f64, f64)]) -> f64 {
    let kept: Vec<f64> = data
        .iter()
        .filter(|(b, n)| *b >= 3.0 && *n > 0.0)
        .map(|p| p.0)
        .collect();
    let lo = kept.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = kept.iter().copied().fold(0.0, f64::max);
    if kept.is_empty() {
        0.0
    } else {
        (hi / lo).log2()
    }
}

struct Prepared {
    x: Vec<(f64, f64)>,
    y: Vec<f64>,
    dropped: usize,
}

fn prepare(data: &[(f64, f64)], params: usize) -> Result<Prepared, FitError> {
    let kept: Vec<&(f64, f64)> = data.iter().filter(|(b, n)| *b >= 3.0 && *n > 0.0).collect();
    let need = params.max(3) + 1;
    if kept.len() < need {
        return Err(FitError::TooFewSamples {
            need,
            have: kept.len(),
        });
    }
    let lo = kept.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = kept.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi < 8.0 * lo {
        return Err(FitError::NarrowRange);
    }
    Ok(Prepared {
        x: kept.iter().map(|(b, _)| (b.ln(), b.ln().ln())).collect(),
        y: kept.iter().map(|(_, n)| n.ln()).collect(),
        dropped: data.len() - kept.len(),
    })
}

/// Ordinary least squares; returns coefficients, residual sum of squares and standard errors.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>), FitError> {
    let n = y.len();
    let p = cols.len();
    let x = DMatrix::from_fn(n, p, |i, j| cols[j][i]);
    let yv = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().any(|&s| s <= smax * 1e-12) {
        return Err(FitError::Degenerate);
    }
    let beta = svd
        .solve(&yv, smax * 1e-12)
        .map_err(|_| FitError::Degenerate)?;
    let r = &yv - &x * &beta;
    let rss = r.dot(&r);
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse().ok_or(FitError::Degenerate)?;
    let sigma2 = if n > p { rss / (n - p) as f64 } else { 0.0 };
    let se = (0..p)
        .map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt())
        .collect();
    Ok((beta.iter().copied().collect(), rss, se))
}

/// Fit log N = log c + a·log B + (b−1)·log log B, with the requested parameters fixed.
pub fn fit_power_log(data: &[(f64, f64)], mode: FitMode) -> Result<FitResult, FitError> {
    let params = if mode == FitMode::Free { 3 } else { 2 };
    let prep = prepare(data, params)?;
    let ones = vec![1.0; prep.y.len()];
    let lb: Vec<f64> = prep.x.iter().map(|x| x.0).collect();
    let llb: Vec<f64> = prep.x.iter().map(|x| x.1).collect();
    let shifted = |coef: f64, by: &[f64]| -> Vec<f64> {
        prep.y.iter().zip(by).map(|(y, x)| y - coef * x).collect()
    };
    let (log_c, a_hat, b1, rss, se) = match mode {
        FitMode::Free => {
            let (beta, rss, se) = least_squares(&[ones, lb, llb], &prep.y)?;
            (beta[0], beta[1], beta[2], rss, [se[0], se[1], se[2]])
        }
        FitMode::FixedA(a) => {
            let (beta, rss, se) = least_squares(&[ones, llb], &shifted(a, &lb))?;
            (beta[0], a, beta[1], rss, [se[0], 0.0, se[1]])
        }
        FitMode::FixedB(b) => {
            let (beta, rss, se) = least_squares(&[ones, lb], &shifted(b - 1.0, &llb))?;
            (beta[0], beta[1], b - 1.0, rss, [se[0], se[1], 0.0])
        }
    };
    Ok(FitResult {
        log_c,
        a_hat,
        b_minus1_hat: b1,
        a_fixed: matches!(mode, FitMode::FixedA(_)),
        b_fixed: matches!(mode, FitMode::FixedB(_)),
        residual: rss,
        std_err: se,
        samples: prep.y.len(),
        dropped: prep.dropped,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ranked {
    pub b_minus1: i64,
    pub log_c: f64,
    pub residual: f64,
}

/// Rank candidate values of b − 1 by the residual of log(N/B^a) = log c + (b−1)·log log B.
pub fn model_compare(
    data: &[(f64, f64)],
    a: f64,
    candidates: &[i64],
) -> Result<Vec<Ranked>, FitError> {
    let prep = prepare(data, 1)?;
    let mut out: Vec<Ranked> = candidates
        .iter()
        .map(|&k| {
            let r: Vec<f64> = prep
                .y
                .iter()
                .zip(&prep.x)
                .map(|(y, (lb, llb))| y - a * lb - k as f64 * llb)
                .collect();
            let log_c = r.iter().sum::<f64>() / r.len() as f64;
            let residual = r.iter().map(|v| (v - log_c).powi(2)).sum();
            Ranked {
                b_minus1: k,
                log_c,
                residual,
            }
        })
        .collect();
    out.sort_by(|x, y| {
        x.residual
            .total_cmp(&y.residual)
            .then(x.b_minus1.cmp(&y.b_minus1))
    });
    Ok(out)
}
