//! Rules for the number of components.
//!
//! The bootstrap criterion builds the scores T once on the data and bootstraps
//! (y_i, t_i) pairs. At step k every replicate regresses y on its resampled
//! t_1..t_k, and a BCa interval is formed for each of the k coefficients. The
//! first k at which some interval covers zero ends the search with K = k − 1.
//!
//! The Q² baseline keeps adding components while
//! Q²_k = 1 − PRESS_k / RSS_{k−1} stays at or above a threshold (0.0975 by
//! default), and always keeps at least one.

use alloc::vec::Vec;
use ndarray::{Array1, Axis};

use crate::bootstrap::{bca_interval, jackknife, resample_pairs, Acceleration, ConfidenceInterval, VectorReplicates};
use crate::cv::{fold_assignment, fold_split};
use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::model::{ComponentModel, LinearPls};
use crate::pls::pls_fit_up_to;
use crate::seed::{derive, tag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingConfig {
    pub k_max: usize,
    /// Bootstrap replicates for the (y, T) criterion.
    pub replicates: usize,
    pub alpha: f64,
    /// Folds for Q².
    pub folds: usize,
    pub q2_threshold: f64,
    pub acceleration: Acceleration,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            k_max: 10,
            replicates: 1000,
            alpha: 0.05,
            folds: 10,
            q2_threshold: 0.0975,
            acceleration: Acceleration::Jackknife,
        }
    }
}

impl StoppingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(invalid("k_max must be positive"));
        }
        if self.replicates == 0 {
            return Err(invalid("at least one bootstrap replicate is required"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha must lie in (0, 1)"));
        }
        if self.folds < 2 {
            return Err(invalid("at least two folds are required"));
        }
        if !self.q2_threshold.is_finite() {
            return Err(invalid("Q2 threshold must be finite"));
        }
        Ok(())
    }
}

/// A rule choosing the number of components of `M` on a dataset.
pub trait StoppingCriterion<M: ComponentModel>: Sync + Send {
    fn select(&self, model: &M, data: &Dataset, seed: u64) -> Result<usize>;
}

/// One interval computed while searching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiTraceEntry {
    /// Number of components in the regression.
    pub k: usize,
    /// 1-based index of the coefficient.
    pub component: usize,
    pub interval: ConfidenceInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// An interval at this k covered zero.
    ZeroCovered(usize),
    /// Every tested k was significant up to the limit.
    LimitReached,
    /// The k-th component could not be built or regressed on.
    CannotBuild(usize),
}

#[derive(Debug, Clone)]
pub struct BootYtOutcome {
    pub k: usize,
    pub trace: Vec<CiTraceEntry>,
    /// Intervals tested, counting the re-tests of earlier coefficients.
    pub tests_performed: usize,
    pub reason: StopReason,
}

/// Runs the bootstrap (y, T) criterion and keeps every interval it computed.
pub fn bootyt_trace<M: ComponentModel>(
    model: &M,
    data: &Dataset,
    cfg: &StoppingConfig,
    seed: u64,
) -> Result<BootYtOutcome> {
    cfg.validate()?;
    let limit = cfg.k_max.min(model.max_components(data));
    let n = data.n();
    let plan = resample_pairs(n, cfg.replicates, seed)?;
    let y = data.raw_y();
    let mut trace = Vec::new();
    let mut tests = 0;
    let mut sequence: Vec<ndarray::Array2<f64>> = Vec::new();
    let mut depth = 0;

    for k in 1..=limit {
        if k > depth {
            // Build scores lazily; most searches stop after a few components.
            depth = (2 * depth).max(3).min(limit);
            sequence = model.score_sequence(data, depth);
        }
        let Some(scores) = sequence.get(k - 1) else {
            return Ok(BootYtOutcome { k: k - 1, trace, tests_performed: tests, reason: StopReason::CannotBuild(k) });
        };
        let Some(original) = model.score_coefficients(scores.view(), y) else {
            return Ok(BootYtOutcome { k: k - 1, trace, tests_performed: tests, reason: StopReason::CannotBuild(k) });
        };
        let statistic = |rows: &[usize]| {
            let t = scores.select(Axis(0), rows);
            let yy = y.select(Axis(0), rows);
            let c = model.score_coefficients_near(t.view(), yy.view(), &original)?;
            (c.iter().all(|v| v.is_finite()) && model.accept_replicate(&c, &original)).then_some(c)
        };
        let replicates = plan.evaluate(|_, rows| statistic(rows));
        let jack = match cfg.acceleration {
            Acceleration::Jackknife => Some(jackknife(n, statistic)),
            Acceleration::Zero => None,
        };
        let reps = VectorReplicates { original, replicates, jackknife: jack };
        let mut covered = false;
        for j in 0..k {
            let interval = bca_interval(&reps.distribution(j), cfg.alpha)?;
            tests += 1;
            covered |= interval.contains(0.0);
            trace.push(CiTraceEntry { k, component: j + 1, interval });
        }
        if covered {
            return Ok(BootYtOutcome { k: k - 1, trace, tests_performed: tests, reason: StopReason::ZeroCovered(k) });
        }
    }
    Ok(BootYtOutcome { k: limit, trace, tests_performed: tests, reason: StopReason::LimitReached })
}

/// The bootstrap (y, T) criterion.
#[derive(Debug, Clone, Copy, Default)]
pub struct BootYt {
    pub cfg: StoppingConfig,
}

impl<M: ComponentModel> StoppingCriterion<M> for BootYt {
    fn select(&self, model: &M, data: &Dataset, seed: u64) -> Result<usize> {
        Ok(bootyt_trace(model, data, &self.cfg, seed)?.k)
    }
}

/// Number of PLS components chosen by the bootstrap (y, T) criterion.
pub fn bootyt_select_k(data: &Dataset, cfg: &StoppingConfig, seed: u64) -> Result<usize> {
    Ok(bootyt_trace(&LinearPls, data, cfg, seed)?.k)
}

#[derive(Debug, Clone)]
pub struct Q2Outcome {
    pub k: usize,
    /// Q²_k for each k evaluated, from k = 1.
    pub q2: Vec<f64>,
    /// True when no component passed the threshold and one was kept anyway.
    pub forced: bool,
}

/// Cross-validated Q² for ordinary PLS.
pub fn q2_trace(data: &Dataset, cfg: &StoppingConfig, seed: u64) -> Result<Q2Outcome> {
    cfg.validate()?;
    let n = data.n();
    let folds = cfg.folds.min(n);
    let limit = cfg.k_max.min(data.max_components());
    let full = pls_fit_up_to(data, limit).ok_or(crate::error::Error::DegenerateDirection)?;

    let labels = fold_assignment(n, folds, derive(seed, &[tag::FOLDS]))?;
    let mut press = Array1::<f64>::zeros(limit);
    let mut depth = full.k;
    for f in 0..folds {
        let (train, test) = fold_split(&labels, f);
        let Some(fit) = data.subset(&train).ok().and_then(|d| pls_fit_up_to(&d, limit)) else {
            depth = 0;
            break;
        };
        depth = depth.min(fit.k);
        let xt = data.raw_x().select(Axis(0), &test);
        let yt = data.raw_y().select(Axis(0), &test);
        for k in 1..=fit.k {
            let pred = fit.truncated(k)?.predict(xt.view())?;
            press[k - 1] += pred.iter().zip(yt.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
    }

    let yc = data.y();
    let mut rss_prev = yc.dot(&yc);
    let mut q2 = Vec::new();
    let mut k_sel = 0;
    for k in 1..=depth {
        let q = 1.0 - press[k - 1] / rss_prev;
        q2.push(q);
        if !(q >= cfg.q2_threshold) {
            break;
        }
        k_sel = k;
        let fitted = full.truncated(k)?.predict(data.raw_x())?;
        rss_prev = fitted.iter().zip(data.raw_y().iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    }
    let forced = k_sel == 0;
    Ok(Q2Outcome { k: k_sel.max(1), q2, forced })
}

/// Number of PLS components chosen by Q².
pub fn q2_select_k(data: &Dataset, cfg: &StoppingConfig, seed: u64) -> Result<usize> {
    Ok(q2_trace(data, cfg, seed)?.k)
}

/// Q² for ordinary PLS.
#[derive(Debug, Clone, Copy, Default)]
pub struct Q2Criterion {
    pub cfg: StoppingConfig,
}

impl StoppingCriterion<LinearPls> for Q2Criterion {
    fn select(&self, _model: &LinearPls, data: &Dataset, seed: u64) -> Result<usize> {
        q2_select_k(data, &self.cfg, seed)
    }
}

/// A fixed number of components, capped by what the data allows.
#[derive(Debug, Clone, Copy)]
pub struct FixedK(pub usize);

impl<M: ComponentModel> StoppingCriterion<M> for FixedK {
    fn select(&self, model: &M, data: &Dataset, _seed: u64) -> Result<usize> {
        Ok(self.0.min(model.max_components(data)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use ndarray::Array2;
    use rand_distr::{Distribution, StandardNormal};

    fn planted(n: usize, p: usize, signal: f64, seed_value: u64) -> Dataset {
        let mut rng = seed::rng(seed_value);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let e: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y = Array1::from_shape_fn(n, |i| signal * x[[i, 0]] + e[i]);
        Dataset::new(x, y, true).unwrap()
    }

    fn quick() -> StoppingConfig {
        StoppingConfig { replicates: 300, k_max: 5, ..StoppingConfig::default() }
    }

    #[test]
    fn strong_single_direction_gives_one_component() {
        let data = planted(100, 1, 3.0, 1);
        let out = bootyt_trace(&LinearPls, &data, &quick(), 7).unwrap();
        assert_eq!(out.k, 1);
        assert_eq!(out.reason, StopReason::LimitReached);
    }

    #[test]
    fn pure_noise_single_predictor_usually_stops_at_zero() {
        let mut zeros = 0;
        for s in 0..40 {
            let data = planted(60, 1, 0.0, 100 + s);
            if bootyt_select_k(&data, &quick(), s).unwrap() == 0 {
                zeros += 1;
            }
        }
        assert!(zeros >= 34, "{zeros} of 40");
    }

    #[test]
    fn every_step_retests_all_earlier_coefficients() {
        let data = planted(80, 6, 2.0, 3);
        let out = bootyt_trace(&LinearPls, &data, &quick(), 9).unwrap();
        let steps = match out.reason {
            StopReason::ZeroCovered(k) | StopReason::CannotBuild(k) => k,
            StopReason::LimitReached => out.k,
        };
        let built = if matches!(out.reason, StopReason::CannotBuild(_)) { steps - 1 } else { steps };
        assert_eq!(out.tests_performed, built * (built + 1) / 2);
        assert_eq!(out.trace.len(), out.tests_performed);
    }

    #[test]
    fn criterion_is_deterministic() {
        let data = planted(70, 8, 1.0, 4);
        let a = bootyt_trace(&LinearPls, &data, &quick(), 5).unwrap();
        let b = bootyt_trace(&LinearPls, &data, &quick(), 5).unwrap();
        assert_eq!(a.k, b.k);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn q2_is_floored_at_one_for_noise() {
        let data = planted(50, 5, 0.0, 8);
        let out = q2_trace(&data, &quick(), 2).unwrap();
        assert!(out.k >= 1);
        if out.q2[0] < 0.0975 {
            assert!(out.forced);
            assert_eq!(out.k, 1);
        }
    }

    #[test]
    fn q2_keeps_signal_component() {
        let data = planted(80, 4, 3.0, 9);
        let out = q2_trace(&data, &quick(), 2).unwrap();
        assert!(!out.forced);
        assert!(out.q2[0] > 0.5);
    }

    #[test]
    fn fixed_k_is_capped() {
        let data = planted(5, 3, 1.0, 1);
        assert_eq!(FixedK(7).select(&LinearPls, &data, 0).unwrap(), 3);
    }
}
