//! PLS1 regression by NIPALS deflation.
//!
//! Component k uses the unit weight vector w_k ∝ X_{k−1}ᵀ y_{k−1}, the score
//! t_k = X_{k−1} w_k, the x-loading p_k = X_{k−1}ᵀ t_k / ‖t_k‖² and the y-loading
//! c_k = y_{k−1}ᵀ t_k / ‖t_k‖². Both X and y are deflated by their least-squares
//! projection on t_k before the next component.

use alloc::vec::Vec;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{norm, solve_upper};

/// Relative threshold below which X_{k−1}ᵀ y_{k−1} is treated as the zero vector.
pub const DEGENERATE_TOL: f64 = 1e-10;

/// A fitted PLS1 model.
#[derive(Debug, Clone)]
pub struct PlsFit {
    /// p×K weight vectors w_k (unit norm).
    pub weights: Array2<f64>,
    /// n×K training scores t_k.
    pub scores: Array2<f64>,
    /// p×K x-loadings p_k.
    pub x_loadings: Array2<f64>,
    /// y-loadings c_k.
    pub y_loadings: Array1<f64>,
    /// p×K rotation R = W (PᵀW)⁻¹ mapping standardized predictors to scores.
    pub rotation: Array2<f64>,
    /// Coefficients on the standardized predictor scale.
    pub std_coefficients: Array1<f64>,
    /// Coefficients on the original predictor scale.
    pub beta: Array1<f64>,
    pub intercept: f64,
    pub k: usize,
    column_means: Array1<f64>,
    column_sds: Array1<f64>,
    y_mean: f64,
}

/// Unit weight vector for one PLS step: Xresᵀ yres normalized.
pub fn pls_weight(xres: ArrayView2<f64>, yres: ArrayView1<f64>) -> Result<Array1<f64>> {
    if xres.nrows() != yres.len() {
        return Err(Error::DimensionMismatch {
            expected: xres.nrows(),
            found: yres.len(),
        });
    }
    let reference = frobenius(xres) * norm(yres);
    let z = xres.t().dot(&yres);
    unit_direction(z, reference)
}

pub(crate) fn unit_direction(z: Array1<f64>, reference: f64) -> Result<Array1<f64>> {
    let nz = norm(z.view());
    if !(nz > DEGENERATE_TOL * reference) || !nz.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    Ok(z / nz)
}

fn frobenius(x: ArrayView2<f64>) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

/// Raw NIPALS output, possibly with fewer columns than requested.
#[derive(Debug, Clone)]
pub(crate) struct Components {
    pub weights: Array2<f64>,
    pub scores: Array2<f64>,
    pub loadings: Array2<f64>,
    pub y_loadings: Vec<f64>,
}

impl Components {
    pub fn built(&self) -> usize {
        self.y_loadings.len()
    }
}

/// Builds up to `k` components on standardized `x` and centred `y`, stopping early
/// at the first degenerate direction.
pub(crate) fn nipals(x: ArrayView2<f64>, y: ArrayView1<f64>, k: usize) -> Components {
    let (n, p) = x.dim();
    let reference = frobenius(x) * norm(y);
    let mut xr = x.to_owned();
    let mut yr = y.to_owned();
    let mut weights = Array2::zeros((p, k));
    let mut scores = Array2::zeros((n, k));
    let mut loadings = Array2::zeros((p, k));
    let mut y_loadings = Vec::with_capacity(k);
    for comp in 0..k {
        let w = match unit_direction(xr.t().dot(&yr), reference) {
            Ok(w) => w,
            Err(_) => break,
        };
        let t = xr.dot(&w);
        let tt = t.dot(&t);
        if !(tt > 0.0) || !tt.is_finite() {
            break;
        }
        let load = xr.t().dot(&t) / tt;
        let c = yr.dot(&t) / tt;
        Zip::from(xr.rows_mut())
            .and(&t)
            .for_each(|mut row, &ti| row.scaled_add(-ti, &load));
        yr.scaled_add(-c, &t);
        weights.column_mut(comp).assign(&w);
        scores.column_mut(comp).assign(&t);
        loadings.column_mut(comp).assign(&load);
        y_loadings.push(c);
    }
    let built = y_loadings.len();
    Components {
        weights: weights.slice(s![.., ..built]).to_owned(),
        scores: scores.slice(s![.., ..built]).to_owned(),
        loadings: loadings.slice(s![.., ..built]).to_owned(),
        y_loadings,
    }
}

/// R = W (PᵀW)⁻¹; PᵀW is upper triangular for NIPALS components.
pub(crate) fn rotation(weights: ArrayView2<f64>, loadings: ArrayView2<f64>) -> Array2<f64> {
    let k = weights.ncols();
    let pw = loadings.t().dot(&weights);
    let mut inv = Array2::zeros((k, k));
    let mut e = alloc::vec![0.0; k];
    for col in 0..k {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[col] = 1.0;
        let x = solve_upper(&pw, &e);
        for row in 0..k {
            inv[[row, col]] = x[row];
        }
    }
    weights.dot(&inv)
}

/// Fits a K-component PLS1 model.
pub fn pls_fit(data: &Dataset, k: usize) -> Result<PlsFit> {
    let available = data.max_components();
    if k == 0 || k > available {
        return Err(Error::TooManyComponents {
            requested: k,
            available,
        });
    }
    let comps = nipals(data.x(), data.y(), k);
    if comps.built() < k {
        return Err(Error::TooManyComponents {
            requested: k,
            available: comps.built(),
        });
    }
    Ok(PlsFit::from_components(data, comps))
}

/// Fits as many components as possible up to `k_max`. Returns `None` if not even one
/// component can be built.
pub(crate) fn pls_fit_up_to(data: &Dataset, k_max: usize) -> Option<PlsFit> {
    let k_max = k_max.min(data.max_components());
    let comps = nipals(data.x(), data.y(), k_max);
    (comps.built() > 0).then(|| PlsFit::from_components(data, comps))
}

impl PlsFit {
    fn from_components(data: &Dataset, comps: Components) -> Self {
        let rotation = rotation(comps.weights.view(), comps.loadings.view());
        let y_loadings = Array1::from(comps.y_loadings);
        let mut fit = Self {
            k: y_loadings.len(),
            weights: comps.weights,
            scores: comps.scores,
            x_loadings: comps.loadings,
            y_loadings,
            rotation,
            std_coefficients: Array1::zeros(0),
            beta: Array1::zeros(0),
            intercept: 0.0,
            column_means: data.column_means().to_owned(),
            column_sds: data.column_sds().to_owned(),
            y_mean: data.y_mean(),
        };
        fit.refresh_coefficients();
        fit
    }

    fn refresh_coefficients(&mut self) {
        self.std_coefficients = self.rotation.dot(&self.y_loadings);
        self.beta = &self.std_coefficients / &self.column_sds;
        self.intercept = self.y_mean - self.beta.dot(&self.column_means);
    }

    /// The same model restricted to its first `k` components.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k {
            return Err(Error::TooManyComponents {
                requested: k,
                available: self.k,
            });
        }
        let mut fit = Self {
            weights: self.weights.slice(s![.., ..k]).to_owned(),
            scores: self.scores.slice(s![.., ..k]).to_owned(),
            x_loadings: self.x_loadings.slice(s![.., ..k]).to_owned(),
            y_loadings: self.y_loadings.slice(s![..k]).to_owned(),
            // Leading block of an upper triangular inverse is the inverse of the block.
            rotation: self.rotation.slice(s![.., ..k]).to_owned(),
            std_coefficients: Array1::zeros(0),
            beta: Array1::zeros(0),
            intercept: 0.0,
            k,
            column_means: self.column_means.clone(),
            column_sds: self.column_sds.clone(),
            y_mean: self.y_mean,
        };
        fit.refresh_coefficients();
        Ok(fit)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Predictions `intercept + Xnew·beta` on the original response scale.
    pub fn predict(&self, xnew: ArrayView2<f64>) -> Result<Array1<f64>> {
        if xnew.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: xnew.ncols(),
            });
        }
        Ok(xnew.dot(&self.beta) + self.intercept)
    }

    /// Scores of new raw observations.
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

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::standardize;
    use crate::seed;
    use nalgebra::{DMatrix, DVector};
    use ndarray::array;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn random_data(n: usize, p: usize, s: u64) -> (Array2<f64>, Array1<f64>) {
        let mut rng = seed::rng(s);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let noise: Array1<f64> = Array1::from_shape_fn(n, |_| StandardNormal.sample(&mut rng));
        let coef = Array1::from_shape_fn(p, |j| (j as f64 + 1.0) * 0.5 - 1.0);
        let y = x.dot(&coef) + noise + 3.0;
        (x, y)
    }

    /// Normal-equations oracle with an intercept, via nalgebra's QR solve.
    fn ols_oracle(x: &Array2<f64>, y: &Array1<f64>) -> Vec<f64> {
        let (n, p) = x.dim();
        let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[[i, j - 1]] });
        let rhs = DVector::from_iterator(n, y.iter().copied());
        let xtx = design.transpose() * &design;
        let xty = design.transpose() * rhs;
        let sol = xtx.lu().solve(&xty).expect("full rank");
        sol.iter().skip(1).copied().collect()
    }

    #[test]
    fn weight_normalizes_by_hand() {
        // Xᵀy = (3, 4) with X = I₂, y = (3, 4).
        let w = pls_weight(array![[1.0, 0.0], [0.0, 1.0]].view(), array![3.0, 4.0].view())
            .unwrap();
        assert!((w[0] - 0.6).abs() < 1e-15 && (w[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn weight_in_one_dimension_is_one() {
        let w = pls_weight(array![[1.0], [2.0]].view(), array![0.5, 1.0].view()).unwrap();
        assert_eq!(w.to_vec(), vec![1.0]);
    }

    #[test]
    fn orthogonal_response_is_degenerate() {
        let x = array![[1.0, 1.0], [-1.0, 1.0], [0.0, -2.0]];
        let y = array![1.0, 1.0, 1.0];
        assert_eq!(pls_weight(x.view(), y.view()).unwrap_err(), Error::DegenerateDirection);
    }

    #[test]
    fn full_rank_fit_equals_ols() {
        for (i, p) in [1usize, 3, 6].iter().enumerate() {
            let (x, y) = random_data(40, *p, 10 + i as u64);
            let d = standardize(x.view(), y.view()).unwrap();
            let fit = pls_fit(&d, *p).unwrap();
            let oracle = ols_oracle(&x, &y);
            for j in 0..*p {
                assert!((fit.beta[j] - oracle[j]).abs() < 1e-8, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn single_predictor_gives_simple_slope() {
        let x = array![[1.0], [2.0], [4.0], [7.0]];
        let y = array![2.0, 3.0, 9.0, 10.0];
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, 1).unwrap();
        let xm = 3.5;
        let ym = 6.0;
        let sxy: f64 = x.column(0).iter().zip(y.iter()).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let sxx: f64 = x.column(0).iter().map(|a| (a - xm) * (a - xm)).sum();
        assert!((fit.beta[0] - sxy / sxx).abs() < 1e-12);
        assert!((fit.intercept - (ym - xm * sxy / sxx)).abs() < 1e-12);
    }

    #[test]
    fn too_many_components() {
        let (x, y) = random_data(5, 8, 3);
        let d = standardize(x.view(), y.view()).unwrap();
        assert!(matches!(pls_fit(&d, 5), Err(Error::TooManyComponents { .. })));
        assert!(matches!(pls_fit(&d, 0), Err(Error::TooManyComponents { .. })));
        assert!(pls_fit(&d, 4).is_ok());
    }

    #[test]
    fn exact_low_rank_response_stops_building() {
        // y lies exactly on the first component direction of a 1-column signal.
        let (x, _) = random_data(20, 4, 5);
        let y = x.column(0).to_owned();
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, 4).unwrap();
        assert!((fit.beta[0] - 1.0).abs() < 1e-8);
        let y1 = array![1.0, 1.0, 1.0, 2.0];
        let x1 = array![[1.0], [1.0], [1.0], [2.0]];
        let d1 = standardize(x1.view(), y1.view()).unwrap();
        assert!(pls_fit(&d1, 1).is_ok());
    }

    #[test]
    fn mean_row_predicts_mean_response() {
        let (x, y) = random_data(30, 5, 8);
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, 2).unwrap();
        let means = d.column_means().insert_axis(Axis(0)).to_owned();
        let pred = fit.predict(means.view()).unwrap();
        assert!((pred[0] - d.y_mean()).abs() < 1e-12);
    }

    #[test]
    fn prediction_matches_component_expansion() {
        let (x, y) = random_data(30, 6, 9);
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, 3).unwrap();
        let (xnew, _) = random_data(5, 6, 99);
        let t = fit.transform(xnew.view()).unwrap();
        let expanded = t.dot(&fit.y_loadings) + fit.y_mean();
        let pred = fit.predict(xnew.view()).unwrap();
        for i in 0..5 {
            assert!((pred[i] - expanded[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn in_sample_residuals_are_orthogonal_to_scores() {
        let (x, y) = random_data(30, 6, 4);
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, 3).unwrap();
        let resid = &y - &fit.predict(x.view()).unwrap();
        for t in fit.scores.axis_iter(Axis(1)) {
            assert!(resid.dot(&t).abs() < 1e-9 * norm(t) * norm(resid.view()).max(1.0));
        }
    }

    #[test]
    fn truncation_matches_direct_fit() {
        let (x, y) = random_data(30, 6, 12);
        let d = standardize(x.view(), y.view()).unwrap();
        let big = pls_fit(&d, 5).unwrap();
        let small = pls_fit(&d, 2).unwrap();
        let cut = big.truncated(2).unwrap();
        for j in 0..6 {
            assert!((cut.beta[j] - small.beta[j]).abs() < 1e-12);
        }
    }

    fn check_invariants(x: &Array2<f64>, y: &Array1<f64>, k: usize) {
        let d = standardize(x.view(), y.view()).unwrap();
        let fit = pls_fit(&d, k).unwrap();
        for w in fit.weights.axis_iter(Axis(1)) {
            assert!((norm(w) - 1.0).abs() < 1e-12);
        }
        for i in 0..k {
            for j in 0..i {
                let ti = fit.scores.column(i);
                let tj = fit.scores.column(j);
                assert!(ti.dot(&tj).abs() <= 1e-8 * norm(ti) * norm(tj));
            }
        }
        // X_k = X − Σ_{i≤k} t_i p_iᵀ must be orthogonal to t_k.
        let mut xk = d.x().to_owned();
        for c in 0..k {
            let t = fit.scores.column(c);
            let p = fit.x_loadings.column(c);
            Zip::from(xk.rows_mut()).and(&t).for_each(|mut row, &ti| row.scaled_add(-ti, &p));
            let r = xk.t().dot(&t);
            assert!(r.iter().all(|v| v.abs() < 1e-10 * norm(t).max(1.0)));
        }
        let fitted = fit.scores.dot(&fit.y_loadings) + d.y_mean();
        let pred = fit.predict(x.view()).unwrap();
        for i in 0..x.nrows() {
            assert!((fitted[i] - pred[i]).abs() < 1e-10 * (1.0 + pred[i].abs()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn fit_invariants_hold(s in 0u64..10_000, n in 8usize..40, p in 1usize..12, k in 1usize..6) {
            let (x, y) = random_data(n, p, s);
            let k = k.min(p).min(n - 1);
            check_invariants(&x, &y, k);
        }
    }
}
