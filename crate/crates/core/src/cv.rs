//! K-fold cross-validation and prediction error.

use alloc::vec::Vec;
use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;

use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};
use crate::gpls::GplsFit;
use crate::pls::{pls_fit, PlsFit};
use crate::seed;
use crate::sparse::SparseFit;

/// Anything that maps raw predictor rows to response predictions.
pub trait Predict {
    fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>>;
}

impl Predict for PlsFit {
    fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        self.predict(x)
    }
}

impl Predict for SparseFit {
    fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        self.predict(x)
    }
}

impl Predict for GplsFit {
    fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        self.predict_proba(x)
    }
}

/// Fold label of every observation. Folds differ in size by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 || folds > n {
        return Err(invalid("fold count must lie in [2, n]"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut labels = alloc::vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        labels[row] = pos % folds;
    }
    Ok(labels)
}

/// Training and test rows of fold `f`.
pub fn fold_split(labels: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l == f {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    (train, test)
}

/// What cross-validated predictions are compared against.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// The observed response.
    Observed,
    /// Explicit values per observation, such as the noise-free signal.
    Values(ArrayView1<'a, f64>),
}

/// Mean over folds of the test-fold mean squared error.
///
/// Models are trained on the observed response of the training folds; predictions
/// on the held-out fold are scored against `target`.
pub fn cv_mse<P, F>(data: &Dataset, folds: usize, seed: u64, target: Target<'_>, fit: F) -> Result<f64>
where
    P: Predict,
    F: Fn(&Dataset) -> Result<P>,
{
    let n = data.n();
    if let Target::Values(v) = target {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let labels = fold_assignment(n, folds, seed)?;
    let mut total = 0.0;
    for f in 0..folds {
        let (train, test) = fold_split(&labels, f);
        let model = fit(&data.subset(&train)?)?;
        let xt = data.raw_x().select(Axis(0), &test);
        let pred = model.predict_rows(xt.view())?;
        let truth = match target {
            Target::Observed => data.raw_y().select(Axis(0), &test),
            Target::Values(v) => v.select(Axis(0), &test),
        };
        total += mse(pred.view(), truth.view());
    }
    Ok(total / folds as f64)
}

/// Ordinary PLS with `k` components on the predictor columns `support`.
#[derive(Debug, Clone)]
pub struct SupportFit {
    pub support: Vec<usize>,
    pub fit: PlsFit,
}

impl SupportFit {
    pub fn new(data: &Dataset, support: &[usize], k: usize) -> Result<Self> {
        let reduced = data.select_columns(support)?;
        let k = k.min(reduced.max_components());
        Ok(Self {
            support: support.to_vec(),
            fit: pls_fit(&reduced, k)?,
        })
    }
}

impl Predict for SupportFit {
    fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        if let Some(&bad) = self.support.iter().find(|&&j| j >= x.ncols()) {
            return Err(Error::DimensionMismatch {
                expected: bad + 1,
                found: x.ncols(),
            });
        }
        self.fit.predict(x.select(Axis(1), &self.support).view())
    }
}

/// Cross-validated MSE of the K-component PLS model on a fixed predictor subset.
pub fn cv_mse_support(
    data: &Dataset,
    support: &[usize],
    k: usize,
    folds: usize,
    seed: u64,
    target: Target<'_>,
) -> Result<f64> {
    cv_mse(data, folds, seed, target, |d| SupportFit::new(d, support, k))
}

pub fn mse(pred: ArrayView1<f64>, truth: ArrayView1<f64>) -> f64 {
    let n = pred.len().max(1) as f64;
    pred.iter().zip(truth.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n
}

/// Mean squared prediction error on a test set.
pub fn pmse<P: Predict>(model: &P, x_test: ArrayView2<f64>, y_test: ArrayView1<f64>) -> Result<f64> {
    if x_test.nrows() != y_test.len() {
        return Err(Error::DimensionMismatch {
            expected: x_test.nrows(),
            found: y_test.len(),
        });
    }
    if y_test.is_empty() {
        return Err(invalid("test set is empty"));
    }
    let pred = model.predict_rows(x_test)?;
    Ok(mse(pred.view(), y_test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn folds_are_balanced_and_reproducible() {
        let a = fold_assignment(23, 5, 9).unwrap();
        assert_eq!(a, fold_assignment(23, 5, 9).unwrap());
        let mut sizes = [0usize; 5];
        for &l in &a {
            sizes[l] += 1;
        }
        assert!(sizes.iter().all(|&s| s == 4 || s == 5));
        assert!(fold_assignment(3, 5, 1).is_err());
    }

    #[test]
    fn exact_linear_signal_has_zero_cv_error() {
        let x = Array2::from_shape_fn((30, 2), |(i, j)| ((i * (j + 3)) % 7) as f64 + i as f64 * 0.1);
        let y = x.column(0).mapv(|v| 2.0 * v) - x.column(1).mapv(|v| v) + 1.0;
        let data = Dataset::new(x, y, true).unwrap();
        let m = cv_mse(&data, 5, 1, Target::Observed, |d| pls_fit(d, 2)).unwrap();
        assert!(m < 1e-18, "{m}");
    }

    #[test]
    fn pmse_is_mean_squared_error() {
        let x = Array2::from_shape_fn((10, 1), |(i, _)| i as f64);
        let y = x.column(0).to_owned();
        let data = Dataset::new(x.clone(), y, true).unwrap();
        let fit = pls_fit(&data, 1).unwrap();
        let shifted = x.column(0).mapv(|v| v + 2.0);
        assert!((pmse(&fit, x.view(), shifted.view()).unwrap() - 4.0).abs() < 1e-12);
    }
}
