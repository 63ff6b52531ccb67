//! Bootstrap predictor selection.
//!
//! Both procedures resample observation pairs, refit the model on each replicate and
//! keep predictor j when the BCa interval of β_j excludes zero. The static procedure
//! fits the same K on every replicate. The dynamic procedure lets a stopping
//! criterion choose K_r inside each replicate; a replicate with K_r = 0 contributes
//! an all-zero coefficient vector. The final model is refitted on the selected
//! predictors.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use ndarray::Array1;

use crate::bootstrap::{jackknife, resample_pairs, Acceleration, ConfidenceInterval, VectorReplicates};
use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};
use crate::model::ComponentModel;
use crate::par::map_indexed;
use crate::seed::{derive, tag};
use crate::stopping::StoppingCriterion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub acceleration: Acceleration,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            alpha: 0.05,
            acceleration: Acceleration::Jackknife,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("at least one bootstrap replicate is required"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SelectionResult<F> {
    /// One interval per predictor of the input data.
    pub intervals: Vec<ConfidenceInterval>,
    /// Predictors whose interval excludes zero, ascending.
    pub support: Vec<usize>,
    /// Replicates per chosen K (a single entry for the static procedure).
    pub k_histogram: BTreeMap<usize, usize>,
    /// Replicates that failed or were rejected by the model's guard.
    pub excluded_replicates: usize,
    pub replicates: usize,
    /// Components used on the original data.
    pub original_k: usize,
    pub original_coefficients: Array1<f64>,
    /// Components of the final model on the support (0 when the support is empty).
    pub final_k: usize,
    pub final_fit: Option<F>,
}

impl<F> SelectionResult<F> {
    pub fn key(&self) -> ModelKey {
        ModelKey {
            support: self.support.clone(),
            k: self.final_k,
        }
    }

    /// The support, or [`Error::EmptySupport`] when nothing was selected.
    pub fn require_support(&self) -> Result<&[usize]> {
        if self.support.is_empty() {
            Err(Error::EmptySupport)
        } else {
            Ok(&self.support)
        }
    }
}

fn coefficients_at<M: ComponentModel>(model: &M, data: &Dataset, k: usize) -> Result<Array1<f64>> {
    if k == 0 {
        return Ok(Array1::zeros(data.p()));
    }
    Ok(model.coefficients(&model.fit(data, k)?))
}

fn run<M, KR, KF>(
    model: &M,
    data: &Dataset,
    cfg: &SelectionConfig,
    seed: u64,
    original_k: usize,
    replicate_k: KR,
    final_k: KF,
) -> Result<SelectionResult<M::Fit>>
where
    M: ComponentModel,
    KR: Fn(&Dataset, u64) -> Result<usize> + Sync + Send,
    KF: Fn(&Dataset, u64) -> Result<usize>,
{
    cfg.validate()?;
    let original = coefficients_at(model, data, original_k)?;
    let original_vec = original.to_vec();
    let plan = resample_pairs(data.n(), cfg.replicates, derive(seed, &[tag::RESAMPLE]))?;

    let outcomes: Vec<Option<(usize, Vec<f64>)>> = map_indexed(plan.replicates(), |r| {
        let sub = data.subset(plan.row(r)).ok()?;
        let k = replicate_k(&sub, derive(seed, &[tag::CRITERION, r as u64])).ok()?;
        let beta = coefficients_at(model, &sub, k).ok()?.to_vec();
        let ok = beta.iter().all(|v| v.is_finite()) && model.accept_replicate(&beta, &original_vec);
        ok.then_some((k, beta))
    });
    let mut k_histogram = BTreeMap::new();
    let mut excluded = 0;
    let mut replicates = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        match o {
            Some((k, beta)) => {
                *k_histogram.entry(k).or_insert(0) += 1;
                replicates.push(Some(beta));
            }
            None => {
                excluded += 1;
                replicates.push(None);
            }
        }
    }

    // Leave-one-out refits at the original K supply the acceleration.
    let jack = match cfg.acceleration {
        Acceleration::Jackknife if original_k > 0 => Some(jackknife(data.n(), |rows| {
            let sub = data.subset(rows).ok()?;
            let beta = coefficients_at(model, &sub, original_k).ok()?.to_vec();
            beta.iter().all(|v| v.is_finite()).then_some(beta)
        })),
        _ => None,
    };
    let reps = VectorReplicates {
        original: original_vec,
        replicates,
        jackknife: jack,
    };
    let intervals = reps.intervals(cfg.alpha)?;
    let support: Vec<usize> = intervals
        .iter()
        .enumerate()
        .filter(|(_, ci)| ci.excludes_zero())
        .map(|(j, _)| j)
        .collect();

    let (final_k, final_fit) = if support.is_empty() {
        (0, None)
    } else {
        let reduced = data.select_columns(&support)?;
        let k = final_k(&reduced, derive(seed, &[tag::FINAL]))?;
        if k == 0 {
            (0, None)
        } else {
            (k, Some(model.fit(&reduced, k)?))
        }
    };

    Ok(SelectionResult {
        intervals,
        support,
        k_histogram,
        excluded_replicates: excluded,
        replicates: cfg.replicates,
        original_k,
        original_coefficients: original,
        final_k,
        final_fit,
    })
}

/// Static selection: K components on the data and on every replicate.
pub fn static_select<M: ComponentModel>(
    model: &M,
    data: &Dataset,
    k: usize,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<SelectionResult<M::Fit>> {
    let available = model.max_components(data);
    if k == 0 || k > available {
        return Err(Error::TooManyComponents {
            requested: k,
            available,
        });
    }
    run(model, data, cfg, seed, k, |_, _| Ok(k), |d, _| Ok(k.min(model.max_components(d))))
}

/// Static selection with K chosen once by `criterion` on the data. The final model
/// on the support is sized by the same criterion.
pub fn static_select_with<M, C>(
    model: &M,
    criterion: &C,
    data: &Dataset,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<SelectionResult<M::Fit>>
where
    M: ComponentModel,
    C: StoppingCriterion<M>,
{
    let k = criterion.select(model, data, derive(seed, &[tag::ORIGINAL]))?;
    run(model, data, cfg, seed, k, |_, _| Ok(k), |d, s| criterion.select(model, d, s))
}

/// Dynamic selection: `criterion` picks K_r inside every replicate.
pub fn dynamic_select<M, C>(
    model: &M,
    criterion: &C,
    data: &Dataset,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<SelectionResult<M::Fit>>
where
    M: ComponentModel,
    C: StoppingCriterion<M>,
{
    let original_k = criterion.select(model, data, derive(seed, &[tag::ORIGINAL]))?;
    run(
        model,
        data,
        cfg,
        seed,
        original_k,
        |d, s| criterion.select(model, d, s),
        |d, s| criterion.select(model, d, s),
    )
}

/// A selected model: predictor support and number of components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelKey {
    pub support: Vec<usize>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub trials: usize,
    pub distinct_supports: usize,
    /// Share of trials selecting the most frequent support.
    pub modal_support_rate: f64,
    pub modal_support: Vec<usize>,
    pub distinct_models: usize,
    /// Share of trials selecting the most frequent (support, K).
    pub modal_model_rate: f64,
    pub modal_model: ModelKey,
}

fn modal<T: Ord + Clone>(counts: &BTreeMap<T, usize>) -> (T, usize) {
    // BTreeMap order makes the tie-break deterministic: the smallest key wins.
    let mut best: Option<(&T, usize)> = None;
    for (key, &c) in counts {
        if best.map_or(true, |(_, b)| c > b) {
            best = Some((key, c));
        }
    }
    let (k, c) = best.expect("non-empty");
    (k.clone(), c)
}

/// Frequency summary of selected models across trials.
pub fn stability_report(models: &[ModelKey]) -> Result<StabilityReport> {
    if models.is_empty() {
        return Err(invalid("no trials to summarize"));
    }
    let mut supports: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut full: BTreeMap<ModelKey, usize> = BTreeMap::new();
    for m in models {
        *supports.entry(m.support.clone()).or_insert(0) += 1;
        *full.entry(m.clone()).or_insert(0) += 1;
    }
    let t = models.len() as f64;
    let (modal_support, sc) = modal(&supports);
    let (modal_model, mc) = modal(&full);
    Ok(StabilityReport {
        trials: models.len(),
        distinct_supports: supports.len(),
        modal_support_rate: sc as f64 / t,
        modal_support,
        distinct_models: full.len(),
        modal_model_rate: mc as f64 / t,
        modal_model,
    })
}
