//! Iteratively reweighted least squares for the two links used by GPLS.

use alloc::vec;
use alloc::vec::Vec;
use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::solve_spd;

pub const IRLS_TOL: f64 = 1e-8;
pub const IRLS_MAX_ITER: usize = 100;
/// Any coefficient beyond this magnitude is reported as divergence.
pub const OVERFLOW_GUARD: f64 = 1e10;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Link {
    #[default]
    Logit,
    /// Gaussian response with identity link (ordinary least squares).
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlmFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// −2 log-likelihood for the logit link, residual sum of squares for identity.
    pub deviance: f64,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Binomial deviance of linear predictors `eta` against 0/1 responses.
pub(crate) fn logit_deviance(eta: &[f64], y: ArrayView1<f64>) -> f64 {
    2.0 * eta
        .iter()
        .zip(y.iter())
        .map(|(&e, &yi)| if yi > 0.5 { softplus(-e) } else { softplus(e) })
        .sum::<f64>()
}

/// [`logit_deviance`] that also stores the fitted probabilities in `mu`, sharing one
/// exponential per observation.
fn deviance_and_mean(eta: &[f64], y: ArrayView1<f64>, mu: &mut [f64]) -> f64 {
    let mut dev = 0.0;
    for ((&e, &yi), m) in eta.iter().zip(y.iter()).zip(mu.iter_mut()) {
        let t = libm::exp(-e.abs());
        let l = libm::log1p(t);
        *m = if e >= 0.0 { 1.0 / (1.0 + t) } else { t / (1.0 + t) };
        let x = if yi > 0.5 { -e } else { e };
        dev += if x > 0.0 { x + l } else { l };
    }
    2.0 * dev
}

pub(crate) fn check_binary(y: ArrayView1<f64>) -> Result<()> {
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    let zeros = y.iter().filter(|&&v| v == 0.0).count();
    if ones + zeros != y.len() || ones == 0 || zeros == 0 {
        return Err(Error::NonBinaryResponse);
    }
    Ok(())
}

/// Column-major copy of `[1 X]`, built once per fit.
struct Columns {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl Columns {
    fn new(design: ArrayView2<f64>) -> Self {
        let (n, m) = (design.nrows(), design.ncols() + 1);
        let mut data = vec![1.0; n * m];
        for (j, col) in design.columns().into_iter().enumerate() {
            for (dst, &v) in data[(j + 1) * n..(j + 2) * n].iter_mut().zip(col.iter()) {
                *dst = v;
            }
        }
        Self { n, m, data }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    fn linear_predictor(&self, beta: &[f64], out: &mut [f64]) {
        out.fill(beta[0]);
        for (j, b) in beta.iter().enumerate().skip(1) {
            for (o, v) in out.iter_mut().zip(self.col(j)) {
                *o += v * b;
            }
        }
    }

    /// Weighted normal equations `[1 X]ᵀ W [1 X] β = [1 X]ᵀ W z`.
    fn weighted_solve(&self, w: &[f64], z: &[f64]) -> Option<Vec<f64>> {
        let (n, m) = (self.n, self.m);
        let mut weighted = vec![0.0; n];
        let mut a = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for r in 0..m {
            for ((d, v), wi) in weighted.iter_mut().zip(self.col(r)).zip(w) {
                *d = wi * v;
            }
            b[r] = dot(&weighted, z);
            for c in 0..=r {
                let v = dot(&weighted, self.col(c));
                a[r * m + c] = v;
                a[c * m + r] = v;
            }
        }
        solve_spd(&mut a, m, &mut b)?;
        Some(b)
    }
}

/// Dot product with four interleaved partial sums combined in a fixed order.
fn dot(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (uc, vc) = (u.chunks_exact(4), v.chunks_exact(4));
    let tail: f64 = uc.remainder().iter().zip(vc.remainder()).map(|(a, b)| a * b).sum();
    for (a, b) in uc.zip(vc) {
        for l in 0..4 {
            acc[l] += a[l] * b[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Fits `y ~ 1 + design` under `link`.
///
/// The logit fit starts from the intercept-only model, halves steps that increase
/// the deviance and stops once the relative deviance change drops below
/// [`IRLS_TOL`]. Complete separation (a fit reproducing every label to within 1e-6)
/// and coefficients beyond [`OVERFLOW_GUARD`] are reported as
/// [`Error::SeparationDivergence`].
pub fn fit_glm(design: ArrayView2<f64>, y: ArrayView1<f64>, link: Link) -> Result<GlmFit> {
    let n = design.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    match link {
        Link::Identity => {
            let ones = vec![1.0; n];
            let z: Vec<f64> = y.to_vec();
            let cols = Columns::new(design);
            let beta = cols.weighted_solve(&ones, &z).ok_or(Error::DegenerateDirection)?;
            let mut eta = vec![0.0; n];
            cols.linear_predictor(&beta, &mut eta);
            let rss = eta.iter().zip(y.iter()).map(|(e, v)| (v - e) * (v - e)).sum();
            Ok(GlmFit {
                intercept: beta[0],
                coefficients: beta[1..].to_vec(),
                converged: true,
                iterations: 1,
                deviance: rss,
            })
        }
        Link::Logit => fit_logit(design, y, None),
    }
}

/// [`fit_glm`] with IRLS started from `start = [intercept, coefficients…]`.
/// Converges to the same estimate within [`IRLS_TOL`], usually in fewer steps when
/// the start is close. The identity link ignores the start.
pub fn fit_glm_from(design: ArrayView2<f64>, y: ArrayView1<f64>, link: Link, start: &[f64]) -> Result<GlmFit> {
    if start.len() != design.ncols() + 1 {
        return Err(Error::DimensionMismatch {
            expected: design.ncols() + 1,
            found: start.len(),
        });
    }
    match link {
        Link::Logit if design.nrows() == y.len() && start.iter().all(|v| v.is_finite()) => {
            fit_logit(design, y, Some(start))
        }
        _ => fit_glm(design, y, link),
    }
}

fn fit_logit(design: ArrayView2<f64>, y: ArrayView1<f64>, start: Option<&[f64]>) -> Result<GlmFit> {
    check_binary(y)?;
    let n = design.nrows();
    let m = design.ncols() + 1;
    let ybar = y.mean().expect("non-empty");
    let mut beta = vec![0.0; m];
    beta[0] = libm::log(ybar / (1.0 - ybar));
    let cols = Columns::new(design);
    let mut eta = vec![0.0; n];
    cols.linear_predictor(&beta, &mut eta);
    if let Some(start) = start {
        // A start worse than the intercept-only model is discarded.
        let mut warm = vec![0.0; n];
        cols.linear_predictor(start, &mut warm);
        if logit_deviance(&warm, y) < logit_deviance(&eta, y) {
            beta.copy_from_slice(start);
            eta = warm;
        }
    }
    let mut mu = vec![0.0; n];
    let mut dev = deviance_and_mean(&eta, y, &mut mu);
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut cand_eta = vec![0.0; n];
    let mut cand_mu = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < IRLS_MAX_ITER {
        iterations += 1;
        for i in 0..n {
            let wi = (mu[i] * (1.0 - mu[i])).max(1e-12);
            w[i] = wi;
            z[i] = eta[i] + (y[i] - mu[i]) / wi;
        }
        let Some(mut candidate) = cols.weighted_solve(&w, &z) else {
            return Err(Error::SeparationDivergence);
        };
        cols.linear_predictor(&candidate, &mut cand_eta);
        let mut cand_dev = deviance_and_mean(&cand_eta, y, &mut cand_mu);
        let mut halvings = 0;
        while !(cand_dev <= dev * (1.0 + 1e-12) + 1e-12) && halvings < MAX_HALVINGS {
            for (c, b) in candidate.iter_mut().zip(&beta) {
                *c = 0.5 * (*c + b);
            }
            cols.linear_predictor(&candidate, &mut cand_eta);
            cand_dev = deviance_and_mean(&cand_eta, y, &mut cand_mu);
            halvings += 1;
        }
        if candidate.iter().any(|c| !c.is_finite() || c.abs() > OVERFLOW_GUARD) {
            return Err(Error::SeparationDivergence);
        }
        let change = (cand_dev - dev).abs() / (cand_dev.abs() + 0.1);
        beta = candidate;
        core::mem::swap(&mut eta, &mut cand_eta);
        core::mem::swap(&mut mu, &mut cand_mu);
        dev = cand_dev;
        if change < IRLS_TOL {
            converged = true;
            break;
        }
    }

    if mu.iter().zip(y.iter()).all(|(&m, &yi)| (m - yi).abs() < 1e-6) {
        return Err(Error::SeparationDivergence);
    }
    Ok(GlmFit {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        converged,
        iterations,
        deviance: dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};

    #[test]
    fn identity_link_is_ols() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = array![1.0, 2.9, 5.1, 7.0];
        let fit = fit_glm(x.view(), y.view(), Link::Identity).unwrap();
        // Hand OLS: slope = Sxy / Sxx = 10.1 / 5 = 2.02, intercept = 4 − 2.02·1.5.
        assert!((fit.coefficients[0] - 2.02).abs() < 1e-12);
        assert!((fit.intercept - (4.0 - 2.02 * 1.5)).abs() < 1e-12);
    }

    #[test]
    fn logistic_matches_closed_form_for_binary_predictor() {
        // With one 0/1 predictor the MLE reproduces the group log-odds exactly.
        // Group x=0: 3 of 10 positive; group x=1: 7 of 10 positive.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..10 {
            xs.push(0.0);
            ys.push(if i < 3 { 1.0 } else { 0.0 });
        }
        for i in 0..10 {
            xs.push(1.0);
            ys.push(if i < 7 { 1.0 } else { 0.0 });
        }
        let x = Array2::from_shape_vec((20, 1), xs).unwrap();
        let y = Array1::from(ys);
        let fit = fit_glm(x.view(), y.view(), Link::Logit).unwrap();
        let l0 = libm::log(3.0 / 7.0);
        let l1 = libm::log(7.0 / 3.0);
        assert!(fit.converged);
        assert!((fit.intercept - l0).abs() < 1e-6);
        assert!((fit.coefficients[0] - (l1 - l0)).abs() < 1e-6);
    }

    #[test]
    fn separable_data_is_flagged() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let y = Array1::from_shape_fn(20, |i| if i >= 10 { 1.0 } else { 0.0 });
        assert_eq!(fit_glm(x.view(), y.view(), Link::Logit).unwrap_err(), Error::SeparationDivergence);
    }

    #[test]
    fn non_binary_response_is_rejected() {
        let x = array![[0.0], [1.0], [2.0]];
        assert_eq!(
            fit_glm(x.view(), array![0.0, 1.0, 2.0].view(), Link::Logit).unwrap_err(),
            Error::NonBinaryResponse
        );
        assert_eq!(
            fit_glm(x.view(), array![1.0, 1.0, 1.0].view(), Link::Logit).unwrap_err(),
            Error::NonBinaryResponse
        );
    }
}
