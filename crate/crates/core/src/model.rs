//! The component-model abstraction shared by stopping criteria and selection.
//!
//! A component model builds latent components on a dataset, regresses the response
//! on them, and maps a K-component fit back to one coefficient per predictor. Linear
//! PLS, sparse PLS at a fixed η, and PLS-logistic regression implement it, so the
//! bootstrap criterion and both selection procedures run unchanged on all three.

use alloc::vec::Vec;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::glm::{fit_glm, fit_glm_from, Link};
use crate::gpls::{exceeds_divergence, gpls_components, gpls_fit_dataset, GplsFit};
use crate::linalg::ols_slopes;
use crate::pls::{nipals, pls_fit, PlsFit};
use crate::sparse::{spls_fit, spls_path, SparseFit};

pub trait ComponentModel: Sync + Send {
    type Fit: Clone + Send + Sync + core::fmt::Debug;

    fn name(&self) -> &'static str;

    /// Fits a `k`-component model, `k ≥ 1`.
    fn fit(&self, data: &Dataset, k: usize) -> Result<Self::Fit>;

    /// Coefficients of a fit on the original predictor scale, one per column of the
    /// dataset it was fitted on.
    fn coefficients(&self, fit: &Self::Fit) -> Array1<f64>;

    /// The n×k score matrix of the first `k` components built on `data`.
    fn scores(&self, data: &Dataset, k: usize) -> Result<Array2<f64>>;

    /// Score matrices for k = 1, 2, … up to `k_max`, stopping at the first k that
    /// cannot be built.
    fn score_sequence(&self, data: &Dataset, k_max: usize) -> Vec<Array2<f64>> {
        (1..=k_max).map_while(|k| self.scores(data, k).ok()).collect()
    }

    /// Regression coefficients of the response on the columns of `scores`
    /// (intercept excluded). `None` when the regression cannot be fitted.
    fn score_coefficients(&self, scores: ArrayView2<f64>, response: ArrayView1<f64>)
        -> Option<Vec<f64>>;

    /// [`Self::score_coefficients`] on a resample, given the estimates on the full
    /// data as a starting point for iterative fits.
    fn score_coefficients_near(
        &self,
        scores: ArrayView2<f64>,
        response: ArrayView1<f64>,
        _reference: &[f64],
    ) -> Option<Vec<f64>> {
        self.score_coefficients(scores, response)
    }

    /// Whether a bootstrap replicate's estimates are kept, given the estimates on
    /// the original data.
    fn accept_replicate(&self, _replicate: &[f64], _reference: &[f64]) -> bool {
        true
    }

    fn max_components(&self, data: &Dataset) -> usize {
        data.max_components()
    }
}

fn nested_sequence(scores: Array2<f64>) -> Vec<Array2<f64>> {
    (1..=scores.ncols())
        .map(|k| scores.slice(s![.., ..k]).to_owned())
        .collect()
}

/// Ordinary PLS1 regression.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearPls;

impl ComponentModel for LinearPls {
    type Fit = PlsFit;

    fn name(&self) -> &'static str {
        "pls"
    }

    fn fit(&self, data: &Dataset, k: usize) -> Result<PlsFit> {
        pls_fit(data, k)
    }

    fn coefficients(&self, fit: &PlsFit) -> Array1<f64> {
        fit.beta.clone()
    }

    fn scores(&self, data: &Dataset, k: usize) -> Result<Array2<f64>> {
        let comps = nipals(data.x(), data.y(), k.min(data.max_components()));
        if comps.built() < k {
            return Err(Error::TooManyComponents {
                requested: k,
                available: comps.built(),
            });
        }
        Ok(comps.scores)
    }

    fn score_sequence(&self, data: &Dataset, k_max: usize) -> Vec<Array2<f64>> {
        let comps = nipals(data.x(), data.y(), k_max.min(data.max_components()));
        nested_sequence(comps.scores)
    }

    fn score_coefficients(&self, scores: ArrayView2<f64>, response: ArrayView1<f64>) -> Option<Vec<f64>> {
        ols_slopes(scores, response)
    }
}

/// Sparse PLS at a fixed sparsity level η.
#[derive(Debug, Clone, Copy)]
pub struct SparsePls {
    pub eta: f64,
}

impl ComponentModel for SparsePls {
    type Fit = SparseFit;

    fn name(&self) -> &'static str {
        "spls"
    }

    fn fit(&self, data: &Dataset, k: usize) -> Result<SparseFit> {
        spls_fit(data, self.eta, k)
    }

    fn coefficients(&self, fit: &SparseFit) -> Array1<f64> {
        fit.beta.clone()
    }

    fn scores(&self, data: &Dataset, k: usize) -> Result<Array2<f64>> {
        let fit = spls_fit(data, self.eta, k)?;
        if fit.k < k {
            return Err(Error::TooManyComponents {
                requested: k,
                available: fit.k,
            });
        }
        Ok(fit.inner.scores)
    }

    fn score_sequence(&self, data: &Dataset, k_max: usize) -> Vec<Array2<f64>> {
        spls_path(data, self.eta, k_max)
            .into_iter()
            .enumerate()
            .map_while(|(i, fit)| (fit.k == i + 1).then_some(fit.inner.scores))
            .collect()
    }

    fn score_coefficients(&self, scores: ArrayView2<f64>, response: ArrayView1<f64>) -> Option<Vec<f64>> {
        ols_slopes(scores, response)
    }
}

/// PLS-logistic regression with the bootstrap divergence guard.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogisticPls;

impl ComponentModel for LogisticPls {
    type Fit = GplsFit;

    fn name(&self) -> &'static str {
        "gpls"
    }

    fn fit(&self, data: &Dataset, k: usize) -> Result<GplsFit> {
        gpls_fit_dataset(data, k, Link::Logit)
    }

    fn coefficients(&self, fit: &GplsFit) -> Array1<f64> {
        fit.beta.clone()
    }

    fn scores(&self, data: &Dataset, k: usize) -> Result<Array2<f64>> {
        let comps = gpls_components(data, k, Link::Logit)?;
        if comps.built() < k {
            return Err(Error::TooManyComponents {
                requested: k,
                available: comps.built(),
            });
        }
        Ok(comps.scores)
    }

    fn score_sequence(&self, data: &Dataset, k_max: usize) -> Vec<Array2<f64>> {
        match gpls_components(data, k_max.min(data.max_components()), Link::Logit) {
            Ok(comps) => nested_sequence(comps.scores),
            Err(_) => Vec::new(),
        }
    }

    fn score_coefficients(&self, scores: ArrayView2<f64>, response: ArrayView1<f64>) -> Option<Vec<f64>> {
        fit_glm(scores, response, Link::Logit).ok().map(|f| f.coefficients)
    }

    fn score_coefficients_near(&self, scores: ArrayView2<f64>, response: ArrayView1<f64>, reference: &[f64]) -> Option<Vec<f64>> {
        let ybar = response.mean()?;
        let mut start = Vec::with_capacity(reference.len() + 1);
        start.push(libm::log(ybar / (1.0 - ybar)));
        start.extend_from_slice(reference);
        fit_glm_from(scores, response, Link::Logit, &start).ok().map(|f| f.coefficients)
    }

    fn accept_replicate(&self, replicate: &[f64], reference: &[f64]) -> bool {
        !exceeds_divergence(replicate, reference)
    }
}
