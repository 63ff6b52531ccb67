//! PLS-logistic regression.
//!
//! Component k has weights w_k,j proportional to the coefficient of the residual
//! predictor x_j in a GLM of y on (t_1, …, t_{k−1}, x_j), normalized to unit length.
//! Residual predictors are obtained by deflating X on each new score, exactly as in
//! linear PLS. The final model is a GLM of y on the K scores.

use alloc::vec;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::glm::{check_binary, fit_glm, fit_glm_from, sigmoid, Link};
use crate::linalg::norm;
use crate::pls::rotation;

/// Replicates whose coefficients exceed this multiple of the original are dropped.
pub const DIVERGENCE_FACTOR: f64 = 1e4;
/// Default number of bootstrap replicates for logistic selection.
pub const DEFAULT_GPLS_REPLICATES: usize = 4000;

#[derive(Debug, Clone)]
pub struct GplsFit {
    /// p×K unit weight vectors.
    pub weights: Array2<f64>,
    pub x_loadings: Array2<f64>,
    /// n×K training scores.
    pub scores: Array2<f64>,
    /// p×K map from standardized predictors to scores.
    pub rotation: Array2<f64>,
    /// GLM coefficients on the scores.
    pub gamma: Array1<f64>,
    /// Coefficients on the standardized predictor scale.
    pub std_coefficients: Array1<f64>,
    /// Coefficients on the original predictor scale.
    pub beta: Array1<f64>,
    pub intercept: f64,
    pub k: usize,
    pub link: Link,
    pub converged: bool,
    /// Deviance of the final GLM on the scores.
    pub deviance: f64,
    column_means: Array1<f64>,
    column_sds: Array1<f64>,
}

pub(crate) struct GplsComponents {
    pub weights: Array2<f64>,
    pub scores: Array2<f64>,
    pub loadings: Array2<f64>,
}

impl GplsComponents {
    pub fn built(&self) -> usize {
        self.weights.ncols()
    }
}

/// Builds up to `k` components, stopping at the first degenerate direction.
pub(crate) fn gpls_components(data: &Dataset, k: usize, link: Link) -> Result<GplsComponents> {
    let y = data.raw_y();
    if link == Link::Logit {
        check_binary(y)?;
    }
    let (n, p) = data.x().dim();
    let mut xr = data.x().to_owned();
    let mut weights = Array2::zeros((p, k));
    let mut scores = Array2::zeros((n, k));
    let mut loadings = Array2::zeros((p, k));
    let mut design = Array2::zeros((n, k));
    let mut built = 0;
    for comp in 0..k {
        // Each column's GLM starts from the fit on the scores built so far, with a
        // zero coefficient for the new column.
        let mut start = vec![0.0; comp + 2];
        if comp > 0 {
            if let Ok(base) = fit_glm(design.slice(s![.., ..comp]), y, link) {
                start[0] = base.intercept;
                start[1..=comp].copy_from_slice(&base.coefficients);
            }
        }
        let mut a = Array1::zeros(p);
        for j in 0..p {
            let col = xr.column(j);
            if norm(col) <= 1e-10 * libm::sqrt(n as f64) {
                continue;
            }
            design.column_mut(comp).assign(&col);
            let fitted = if comp > 0 {
                fit_glm_from(design.slice(s![.., ..=comp]), y, link, &start)
            } else {
                fit_glm(design.slice(s![.., ..=comp]), y, link)
            };
            match fitted {
                Ok(fit) => a[j] = fit.coefficients[comp],
                Err(Error::SeparationDivergence) if comp == 0 => {
                    return Err(Error::SeparationDivergence)
                }
                Err(_) => {}
            }
        }
        let na = norm(a.view());
        if !(na > 0.0) || !na.is_finite() {
            break;
        }
        let w = a / na;
        let t = xr.dot(&w);
        let tt = t.dot(&t);
        if !(tt > 1e-20 * n as f64) {
            break;
        }
        let load = xr.t().dot(&t) / tt;
        Zip::from(xr.rows_mut())
            .and(&t)
            .for_each(|mut row, &ti| row.scaled_add(-ti, &load));
        weights.column_mut(comp).assign(&w);
        scores.column_mut(comp).assign(&t);
        loadings.column_mut(comp).assign(&load);
        design.column_mut(comp).assign(&t);
        built += 1;
    }
    if built == 0 {
        return Err(Error::DegenerateDirection);
    }
    Ok(GplsComponents {
        weights: weights.slice(s![.., ..built]).to_owned(),
        scores: scores.slice(s![.., ..built]).to_owned(),
        loadings: loadings.slice(s![.., ..built]).to_owned(),
    })
}

/// Fits a K-component PLS-logistic model to raw predictors and a 0/1 response.
/// Predictors are centred and scaled.
pub fn gpls_fit(x: ArrayView2<f64>, y: ArrayView1<f64>, k: usize) -> Result<GplsFit> {
    let data = Dataset::new(x.to_owned(), y.to_owned(), true)?;
    gpls_fit_dataset(&data, k, Link::Logit)
}

pub fn gpls_fit_dataset(data: &Dataset, k: usize, link: Link) -> Result<GplsFit> {
    let available = data.max_components();
    if k == 0 || k > available {
        return Err(Error::TooManyComponents {
            requested: k,
            available,
        });
    }
    let comps = gpls_components(data, k, link)?;
    if comps.built() < k {
        return Err(Error::TooManyComponents {
            requested: k,
            available: comps.built(),
        });
    }
    let glm = fit_glm(comps.scores.view(), data.raw_y(), link)?;
    let rotation = rotation(comps.weights.view(), comps.loadings.view());
    let gamma = Array1::from(glm.coefficients);
    let std_coefficients = rotation.dot(&gamma);
    let beta = &std_coefficients / &data.column_sds();
    let intercept = glm.intercept - beta.dot(&data.column_means());
    Ok(GplsFit {
        weights: comps.weights,
        x_loadings: comps.loadings,
        scores: comps.scores,
        rotation,
        gamma,
        std_coefficients,
        beta,
        intercept,
        k,
        link,
        converged: glm.converged,
        deviance: glm.deviance,
        column_means: data.column_means().to_owned(),
        column_sds: data.column_sds().to_owned(),
    })
}

impl GplsFit {
    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Linear predictor on new raw rows.
    pub fn predict_linear(&self, xnew: ArrayView2<f64>) -> Result<Array1<f64>> {
        if xnew.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: xnew.ncols(),
            });
        }
        Ok(xnew.dot(&self.beta) + self.intercept)
    }

    /// Fitted mean: a probability under the logit link.
    pub fn predict_proba(&self, xnew: ArrayView2<f64>) -> Result<Array1<f64>> {
        let eta = self.predict_linear(xnew)?;
        Ok(match self.link {
            Link::Logit => eta.mapv(sigmoid),
            Link::Identity => eta,
        })
    }

    /// Scores of new raw rows.
    pub fn transform(&self, xnew: ArrayView2<f64>) -> Result<Array2<f64>> {
        if xnew.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: xnew.ncols(),
            });
        }
        let std = (&xnew - &self.column_means.view().insert_axis(Axis(0)))
            / &self.column_sds.view().insert_axis(Axis(0));
        Ok(std.dot(&self.rotation))
    }

    /// Bernoulli log-likelihood of the fit on its training data.
    pub fn log_likelihood(&self) -> f64 {
        -0.5 * self.deviance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardDecision {
    Keep,
    Exclude,
}

/// True when some coefficient is more than [`DIVERGENCE_FACTOR`] times its
/// original value in magnitude. Coordinates whose original value is zero are not
/// compared.
pub fn exceeds_divergence(replicate: &[f64], reference: &[f64]) -> bool {
    replicate.iter().zip(reference).any(|(&b, &r)| {
        !b.is_finite() || (r != 0.0 && b.abs() > DIVERGENCE_FACTOR * r.abs())
    })
}

pub fn divergence_guard(replicate: &GplsFit, reference: &GplsFit) -> GuardDecision {
    if exceeds_divergence(&replicate.beta.to_vec(), &reference.beta.to_vec()) {
        GuardDecision::Exclude
    } else {
        GuardDecision::Keep
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationMetrics {
    /// Observations on the wrong side of p̂ = 0.5 (ties predict class 0).
    pub misclassified: usize,
    /// Mean squared difference between p̂ and the 0/1 label.
    pub mse: f64,
}

pub fn classification_metrics(prob: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<ClassificationMetrics> {
    if prob.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: prob.len(),
            found: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::InvalidParameter("no observations to classify".into()));
    }
    let mut misclassified = 0;
    let mut sse = 0.0;
    for (&ph, &yi) in prob.iter().zip(y.iter()) {
        let class = if ph > 0.5 { 1.0 } else { 0.0 };
        if class != yi {
            misclassified += 1;
        }
        sse += (ph - yi) * (ph - yi);
    }
    Ok(ClassificationMetrics {
        misclassified,
        mse: sse / y.len() as f64,
    })
}

pub fn classify_metrics(fit: &GplsFit, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<ClassificationMetrics> {
    let prob = fit.predict_proba(x)?;
    classification_metrics(prob.view(), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use ndarray::array;
    use rand_distr::{Distribution, StandardNormal};

    fn logistic_data(n: usize, p: usize, beta: &[f64], seed_value: u64) -> (Array2<f64>, Array1<f64>) {
        let mut rng = seed::rng(seed_value);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let u: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let y = Array1::from_shape_fn(n, |i| {
            let eta: f64 = beta.iter().enumerate().map(|(j, b)| b * x[[i, j]]).sum();
            if u[i] < sigmoid(eta) { 1.0 } else { 0.0 }
        });
        (x, y)
    }

    #[test]
    fn one_predictor_sign_matches_univariate_slope() {
        let (x, y) = logistic_data(200, 1, &[-1.2], 3);
        let fit = gpls_fit(x.view(), y.view(), 1).unwrap();
        let uni = fit_glm(x.view(), y.view(), Link::Logit).unwrap();
        assert_eq!(fit.beta[0].signum(), uni.coefficients[0].signum());
        // With one predictor the model is the univariate GLM itself.
        assert!((fit.beta[0] - uni.coefficients[0]).abs() < 1e-6);
        assert!((fit.intercept - uni.intercept).abs() < 1e-6);
    }

    #[test]
    fn identity_link_first_weights_follow_univariate_slopes() {
        let x = array![
            [1.0, 2.0, 0.5],
            [2.0, 1.0, 1.5],
            [3.0, 5.0, 0.0],
            [4.0, 2.0, 2.5],
            [5.0, 7.0, 1.0],
            [6.0, 3.0, 3.0]
        ];
        let y = array![1.0, 1.5, 3.5, 3.0, 6.0, 5.5];
        let data = Dataset::new(x, y, true).unwrap();
        let fit = gpls_fit_dataset(&data, 1, Link::Identity).unwrap();
        let xs = data.x();
        let yc = data.y();
        let slopes: Vec<f64> = (0..3)
            .map(|j| xs.column(j).dot(&yc) / xs.column(j).dot(&xs.column(j)))
            .collect();
        let ns = libm::sqrt(slopes.iter().map(|v| v * v).sum());
        for j in 0..3 {
            assert!((fit.weights[[j, 0]] - slopes[j] / ns).abs() < 1e-6);
        }
    }

    #[test]
    fn log_likelihood_is_monotone_in_k() {
        let (x, y) = logistic_data(150, 6, &[1.0, -0.8, 0.5, 0.0, 0.0, 0.3], 11);
        let mut last = f64::NEG_INFINITY;
        for k in 1..=4 {
            let fit = gpls_fit(x.view(), y.view(), k).unwrap();
            assert!(fit.log_likelihood() >= last - 1e-8, "k = {k}");
            last = fit.log_likelihood();
        }
    }

    #[test]
    fn scores_reproduce_from_rotation() {
        let (x, y) = logistic_data(120, 5, &[1.0, 0.5, 0.0, -0.5, 0.2], 5);
        let fit = gpls_fit(x.view(), y.view(), 3).unwrap();
        let t = fit.transform(x.view()).unwrap();
        for (a, b) in t.iter().zip(fit.scores.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn guard_excludes_only_large_ratios() {
        let reference = [1.0, -2.0, 0.0];
        assert!(!exceeds_divergence(&[9_999.0, 1.0, 5.0], &reference));
        assert!(exceeds_divergence(&[10_001.0, 1.0, 0.0], &reference));
        assert!(exceeds_divergence(&[1.0, 20_001.0, 0.0], &reference));
        // A zero original coefficient never triggers the guard.
        assert!(!exceeds_divergence(&[1.0, 1.0, 1e12], &reference));
    }

    #[test]
    fn ties_at_one_half_predict_class_zero() {
        let m = classification_metrics(array![0.5, 0.51, 0.2].view(), array![1.0, 1.0, 0.0].view()).unwrap();
        assert_eq!(m.misclassified, 1);
        assert!((m.mse - (0.25 + 0.49 * 0.49 + 0.04) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_binary_response_is_rejected() {
        let x = array![[1.0], [2.0], [3.0]];
        assert_eq!(
            gpls_fit(x.view(), array![0.0, 2.0, 1.0].view(), 1).unwrap_err(),
            Error::NonBinaryResponse
        );
    }
}
