//! Sparse PLS with soft-thresholded directions, and its two tuning strategies.
//!
//! At step k the direction z = Xᵀ y_res is soft-thresholded at η·max|z|. The
//! selected predictors join an active set A, ordinary PLS with min(k, |A|)
//! components is refitted on A, and y_res is the residual of that fit. X itself is
//! never deflated. η = 0 keeps every predictor and reduces to ordinary PLS.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use ndarray::{Array1, ArrayView1, ArrayView2, Axis};

use crate::bootstrap::Acceleration;
use crate::cv::{fold_assignment, fold_split, mse, cv_mse, Target};
use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};
use crate::linalg::norm;
use crate::model::SparsePls;
use crate::par::map_indexed;
use crate::pls::{pls_fit, PlsFit, DEGENERATE_TOL};
use crate::seed::{derive, tag};
use crate::stopping::{bootyt_trace, CiTraceEntry, StoppingConfig};

/// Soft-thresholded unit direction.
///
/// Entries with |z_j| ≤ η·max|z| become 0; the rest shrink towards 0 by η·max|z|.
pub fn sparse_weight(z: ArrayView1<f64>, eta: f64) -> Result<Array1<f64>> {
    if eta.is_nan() || eta < 0.0 {
        return Err(invalid("eta must lie in [0, 1)"));
    }
    if eta >= 1.0 {
        return Err(Error::EmptySupport);
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let max = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(max > 0.0) {
        return Err(Error::DegenerateDirection);
    }
    let thr = eta * max;
    let w = z.mapv(|v| if v.abs() > thr { v.signum() * (v.abs() - thr) } else { 0.0 });
    let nw = norm(w.view());
    if !(nw > 0.0) {
        return Err(Error::DegenerateDirection);
    }
    Ok(w / nw)
}

#[derive(Debug, Clone)]
pub struct SparseFit {
    /// Selected predictor indices, ascending.
    pub active_set: Vec<usize>,
    /// Ordinary PLS refitted on the active predictors.
    pub inner: PlsFit,
    pub eta: f64,
    /// Components in the refitted model, min(requested, |A|).
    pub k: usize,
    pub requested_k: usize,
    /// Coefficients for all p predictors on the original scale, zero outside A.
    pub beta: Array1<f64>,
    pub intercept: f64,
}

impl SparseFit {
    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn predict(&self, xnew: ArrayView2<f64>) -> Result<Array1<f64>> {
        if xnew.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: xnew.ncols(),
            });
        }
        Ok(xnew.dot(&self.beta) + self.intercept)
    }
}

/// Sparse fits for k = 1, …, `k_max`, stopping early when no direction remains.
pub fn spls_path(data: &Dataset, eta: f64, k_max: usize) -> Vec<SparseFit> {
    let p = data.p();
    let x = data.x();
    let y = data.y();
    let reference = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>()) * norm(y);
    let mut active: Vec<usize> = Vec::new();
    let mut y_res = y.to_owned();
    let mut path = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let z = x.t().dot(&y_res);
        if !(norm(z.view()) > DEGENERATE_TOL * reference) {
            break;
        }
        let Ok(w) = sparse_weight(z.view(), eta) else {
            break;
        };
        for (j, &v) in w.iter().enumerate() {
            if v != 0.0 && !active.contains(&j) {
                active.push(j);
            }
        }
        active.sort_unstable();
        let Ok(sub) = data.select_columns(&active) else {
            break;
        };
        let kk = k.min(sub.max_components());
        let Ok(inner) = pls_fit(&sub, kk) else {
            break;
        };
        let mut std_full = Array1::zeros(p);
        let mut beta = Array1::zeros(p);
        for (pos, &j) in active.iter().enumerate() {
            std_full[j] = inner.std_coefficients[pos];
            beta[j] = inner.beta[pos];
        }
        y_res = &y - &x.dot(&std_full);
        path.push(SparseFit {
            active_set: active.clone(),
            intercept: inner.intercept,
            inner,
            eta,
            k: kk,
            requested_k: k,
            beta,
        });
    }
    path
}

pub fn spls_fit(data: &Dataset, eta: f64, k: usize) -> Result<SparseFit> {
    if eta.is_nan() || eta < 0.0 {
        return Err(invalid("eta must lie in [0, 1)"));
    }
    if eta >= 1.0 {
        return Err(Error::EmptySupport);
    }
    let available = data.max_components();
    if k == 0 || k > available {
        return Err(Error::TooManyComponents {
            requested: k,
            available,
        });
    }
    let mut path = spls_path(data, eta, k);
    if path.len() < k {
        if path.is_empty() {
            return Err(Error::DegenerateDirection);
        }
        return Err(Error::TooManyComponents {
            requested: k,
            available: path.len(),
        });
    }
    Ok(path.pop().expect("non-empty path"))
}

/// Grid and depth for sparse PLS tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityConfig {
    /// Candidate η values, each in [0, 1).
    pub eta_grid: Vec<f64>,
    pub k_max: usize,
    pub folds: usize,
}

impl Default for SparsityConfig {
    fn default() -> Self {
        Self {
            eta_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
            k_max: 10,
            folds: 10,
        }
    }
}

impl SparsityConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.eta_grid.is_empty() {
            return Err(invalid("eta grid is empty"));
        }
        if self.eta_grid.iter().any(|e| !(0.0..1.0).contains(e)) {
            return Err(invalid("eta values must lie in [0, 1)"));
        }
        if self.k_max == 0 {
            return Err(invalid("k_max must be positive"));
        }
        if self.folds < 2 || self.folds > n {
            return Err(invalid("fold count must lie in [2, n]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvCell {
    pub eta: f64,
    pub k: usize,
    /// Fold-averaged MSE; infinite when some fold could not fit the cell.
    pub mse: f64,
}

#[derive(Debug, Clone)]
pub struct CvTuning {
    pub eta: f64,
    pub k: usize,
    pub table: Vec<CvCell>,
    /// Number of (η, K) cells evaluated.
    pub models_evaluated: usize,
}

/// Joint (η, K) choice by K-fold cross-validation.
///
/// Every cell of the grid × {1..k_max} is scored by its fold-mean MSE. Ties go to
/// the smaller K, then the smaller η.
pub fn tune_cv(data: &Dataset, cfg: &SparsityConfig, seed: u64) -> Result<CvTuning> {
    cfg.validate(data.n())?;
    let labels = fold_assignment(data.n(), cfg.folds, derive(seed, &[tag::FOLDS]))?;
    let n_eta = cfg.eta_grid.len();
    // errors[fold * n_eta + e][k - 1]
    let per_task: Vec<Vec<f64>> = map_indexed(cfg.folds * n_eta, |task| {
        let f = task / n_eta;
        let eta = cfg.eta_grid[task % n_eta];
        let (train, test) = fold_split(&labels, f);
        let mut out = alloc::vec![f64::INFINITY; cfg.k_max];
        let Ok(sub) = data.subset(&train) else {
            return out;
        };
        let xt = data.raw_x().select(Axis(0), &test);
        let yt = data.raw_y().select(Axis(0), &test);
        for (k0, fit) in spls_path(&sub, eta, cfg.k_max).iter().enumerate() {
            if let Ok(pred) = fit.predict(xt.view()) {
                out[k0] = mse(pred.view(), yt.view());
            }
        }
        out
    });

    let mut table = Vec::with_capacity(n_eta * cfg.k_max);
    for (e, &eta) in cfg.eta_grid.iter().enumerate() {
        for k in 1..=cfg.k_max {
            let mut sum = 0.0;
            for f in 0..cfg.folds {
                sum += per_task[f * n_eta + e][k - 1];
            }
            let mse = if sum.is_finite() { sum / cfg.folds as f64 } else { f64::INFINITY };
            table.push(CvCell { eta, k, mse });
        }
    }
    let best = table
        .iter()
        .filter(|c| c.mse.is_finite())
        .min_by(|a, b| {
            a.mse
                .total_cmp(&b.mse)
                .then(a.k.cmp(&b.k))
                .then(a.eta.total_cmp(&b.eta))
        })
        .copied()
        .ok_or(Error::NoValidEta)?;
    Ok(CvTuning {
        eta: best.eta,
        k: best.k,
        models_evaluated: table.len(),
        table,
    })
}

/// Per-η outcome of bootstrap tuning.
#[derive(Debug, Clone)]
pub struct EtaOutcome {
    pub eta: f64,
    /// Components kept by the bootstrap criterion (0 when it failed).
    pub k: usize,
    /// Fold-mean MSE of the (η, K) model; `None` when the η was dropped.
    pub cv_mse: Option<f64>,
    /// Why the η was dropped, if it was.
    pub dropped: Option<String>,
    pub tests_performed: usize,
    pub trace: Vec<CiTraceEntry>,
}

#[derive(Debug, Clone)]
pub struct BootTuning {
    pub eta: f64,
    pub k: usize,
    pub per_eta: Vec<EtaOutcome>,
    /// Number of final (η, K) models scored by cross-validation.
    pub models_evaluated: usize,
}

/// Per-η component choice by the bootstrap criterion, then η by cross-validation.
///
/// Each η gets its own component count from the (y, T) bootstrap; only the |grid|
/// resulting models are compared by CV on shared folds.
pub fn tune_bootyt(
    data: &Dataset,
    cfg: &SparsityConfig,
    replicates: usize,
    alpha: f64,
    seed: u64,
) -> Result<BootTuning> {
    let stopping = StoppingConfig {
        k_max: cfg.k_max,
        replicates,
        alpha,
        folds: cfg.folds,
        acceleration: Acceleration::Jackknife,
        ..StoppingConfig::default()
    };
    tune_bootyt_with(data, cfg, &stopping, seed)
}

pub fn tune_bootyt_with(
    data: &Dataset,
    cfg: &SparsityConfig,
    stopping: &StoppingConfig,
    seed: u64,
) -> Result<BootTuning> {
    cfg.validate(data.n())?;
    if stopping.replicates < 100 {
        return Err(invalid("bootstrap tuning needs at least 100 replicates"));
    }
    let stop_cfg = StoppingConfig {
        k_max: cfg.k_max,
        ..*stopping
    };
    let fold_seed = derive(seed, &[tag::FOLDS]);
    let per_eta: Vec<EtaOutcome> = cfg
        .eta_grid
        .iter()
        .map(|&eta| {
            let eta_seed = derive(seed, &[tag::ETA, eta.to_bits()]);
            let model = SparsePls { eta };
            match bootyt_trace(&model, data, &stop_cfg, eta_seed) {
                Ok(outcome) if outcome.k == 0 => EtaOutcome {
                    eta,
                    k: 0,
                    cv_mse: None,
                    dropped: Some("no significant component".to_string()),
                    tests_performed: outcome.tests_performed,
                    trace: outcome.trace,
                },
                Ok(outcome) => {
                    let k = outcome.k;
                    let scored = cv_mse(data, cfg.folds, fold_seed, Target::Observed, |d| {
                        spls_fit(d, eta, k.min(d.max_components()))
                    });
                    let (cv_mse, dropped) = match scored {
                        Ok(v) => (Some(v), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    EtaOutcome {
                        eta,
                        k,
                        cv_mse,
                        dropped,
                        tests_performed: outcome.tests_performed,
                        trace: outcome.trace,
                    }
                }
                Err(e) => EtaOutcome {
                    eta,
                    k: 0,
                    cv_mse: None,
                    dropped: Some(e.to_string()),
                    tests_performed: 0,
                    trace: Vec::new(),
                },
            }
        })
        .collect();

    let models_evaluated = per_eta.iter().filter(|o| o.k > 0).count();
    let best = per_eta
        .iter()
        .filter_map(|o| o.cv_mse.map(|m| (m, o)))
        .min_by(|(ma, a), (mb, b)| {
            ma.total_cmp(mb)
                .then(a.k.cmp(&b.k))
                .then(a.eta.total_cmp(&b.eta))
        })
        .map(|(_, o)| (o.eta, o.k))
        .ok_or(Error::NoValidEta)?;
    Ok(BootTuning {
        eta: best.0,
        k: best.1,
        per_eta,
        models_evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use ndarray::{array, Array2};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn soft_threshold_hand_examples() {
        let z = array![10.0, 4.0, 1.0];
        let w = sparse_weight(z.view(), 0.5).unwrap();
        assert_eq!(w.to_vec(), vec![1.0, 0.0, 0.0]);
        let w = sparse_weight(z.view(), 0.35).unwrap();
        let nrm = libm::sqrt(6.5f64 * 6.5 + 0.25);
        assert!((w[0] - 6.5 / nrm).abs() < 1e-12);
        assert!((w[1] - 0.5 / nrm).abs() < 1e-12);
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn eta_zero_is_plain_normalization() {
        let z = array![3.0, -4.0, 0.0];
        let w = sparse_weight(z.view(), 0.0).unwrap();
        assert_eq!(w.to_vec(), vec![0.6, -0.8, 0.0]);
        assert_eq!(sparse_weight(z.view(), 1.0).unwrap_err(), Error::EmptySupport);
        assert!(sparse_weight(array![0.0, 0.0].view(), 0.3).is_err());
    }

    fn toy(n: usize, p: usize, seed_value: u64) -> Dataset {
        let mut rng = seed::rng(seed_value);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y = Array1::from_shape_fn(n, |i| 2.0 * x[[i, 0]] - 1.5 * x[[i, 1]] + 0.5 * noise[i]);
        Dataset::new(x, y, true).unwrap()
    }

    #[test]
    fn eta_zero_matches_ordinary_pls() {
        let data = toy(40, 6, 2);
        for k in 1..=4 {
            let s = spls_fit(&data, 0.0, k).unwrap();
            let o = pls_fit(&data, k).unwrap();
            assert_eq!(s.active_set.len(), 6);
            for (a, b) in s.beta.iter().zip(o.beta.iter()) {
                assert!((a - b).abs() < 1e-10, "k = {k}");
            }
        }
    }

    #[test]
    fn large_eta_keeps_few_predictors() {
        let data = toy(60, 20, 4);
        let fit = spls_fit(&data, 0.9, 1).unwrap();
        assert_eq!(fit.active_set.len(), 1);
        assert!(fit.active_set[0] < 2);
        let nonzero = fit.beta.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn active_set_grows_along_path() {
        let data = toy(60, 20, 5);
        let path = spls_path(&data, 0.6, 4);
        for pair in path.windows(2) {
            assert!(pair[0].active_set.iter().all(|j| pair[1].active_set.contains(j)));
        }
        for fit in &path {
            assert!(fit.k <= fit.active_set.len());
        }
    }

    #[test]
    fn cv_tuning_covers_the_whole_grid() {
        let data = toy(50, 8, 6);
        let cfg = SparsityConfig {
            eta_grid: vec![0.1, 0.5, 0.8],
            k_max: 3,
            folds: 5,
        };
        let t = tune_cv(&data, &cfg, 1).unwrap();
        assert_eq!(t.models_evaluated, 9);
        assert_eq!(t.table.len(), 9);
        let best = t.table.iter().map(|c| c.mse).fold(f64::INFINITY, f64::min);
        let chosen = t.table.iter().find(|c| c.eta == t.eta && c.k == t.k).unwrap();
        assert_eq!(chosen.mse, best);
        assert_eq!(tune_cv(&data, &cfg, 1).unwrap().eta, t.eta);
    }

    #[test]
    fn boot_tuning_scores_one_model_per_eta() {
        let data = toy(50, 8, 7);
        let cfg = SparsityConfig {
            eta_grid: vec![0.2, 0.5],
            k_max: 3,
            folds: 5,
        };
        let t = tune_bootyt(&data, &cfg, 200, 0.05, 3).unwrap();
        assert_eq!(t.per_eta.len(), 2);
        assert_eq!(t.models_evaluated, 2);
        assert!(t.k >= 1);
    }
}
