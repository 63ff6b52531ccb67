use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use ndarray::{Array1, Array2};

use crate::cv::{cv_mse_support, pmse, SupportFit, Target};
use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::model::LinearPls;
use crate::par::map_indexed;
use crate::selection::{dynamic_select, stability_report, static_select_with, ModelKey, SelectionConfig, StabilityReport};
use crate::seed::{derive, tag};
use crate::sim::designs::{gen_hidden_groups, HiddenGroupDesign};
use crate::sim::metrics::accuracy;
use crate::sparse::{spls_fit, tune_bootyt_with, tune_cv, SparsityConfig};
use crate::stopping::{BootYt, Q2Criterion, StoppingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Static bootstrap selection with K from Q².
    Q2,
    /// Static bootstrap selection with K from the (y, T) criterion.
    BootYt,
    /// Dynamic bootstrap selection with the (y, T) criterion.
    BootYtDyn,
    SplsCv,
    SplsBootYt,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Q2, Method::BootYt, Method::BootYtDyn, Method::SplsCv, Method::SplsBootYt];

    pub fn label(self) -> &'static str {
        match self {
            Method::Q2 => "Q2",
            Method::BootYt => "BootYT",
            Method::BootYtDyn => "BootYTdyn",
            Method::SplsCv => "SPLS CV",
            Method::SplsBootYt => "SPLS BootYT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "q2" => Some(Method::Q2),
            "bootyt" => Some(Method::BootYt),
            "bootytdyn" => Some(Method::BootYtDyn),
            "splscv" => Some(Method::SplsCv),
            "splsbootyt" => Some(Method::SplsBootYt),
            _ => None,
        }
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }

    fn is_sparse(self) -> bool {
        matches!(self, Method::SplsCv | Method::SplsBootYt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSettings {
    pub selection: SelectionConfig,
    /// Component criteria; also the replicates and level of SPLS BootYT.
    pub stopping: StoppingConfig,
    pub sparsity: SparsityConfig,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            selection: SelectionConfig::default(),
            stopping: StoppingConfig::default(),
            sparsity: SparsityConfig::default(),
        }
    }
}

/// What one method selected on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub support: Vec<usize>,
    pub k: usize,
    pub eta: Option<f64>,
}

/// Runs one method on one dataset.
pub fn run_method(method: Method, settings: &MethodSettings, data: &Dataset, seed: u64) -> Result<Selected> {
    let boot = BootYt { cfg: settings.stopping };
    let from_selection = |support: Vec<usize>, k: usize| Selected { support, k, eta: None };
    Ok(match method {
        Method::Q2 => {
            let crit = Q2Criterion { cfg: settings.stopping };
            let r = static_select_with(&LinearPls, &crit, data, &settings.selection, seed)?;
            from_selection(r.support, r.final_k)
        }
        Method::BootYt => {
            let r = static_select_with(&LinearPls, &boot, data, &settings.selection, seed)?;
            from_selection(r.support, r.final_k)
        }
        Method::BootYtDyn => {
            let r = dynamic_select(&LinearPls, &boot, data, &settings.selection, seed)?;
            from_selection(r.support, r.final_k)
        }
        Method::SplsCv => {
            let t = tune_cv(data, &settings.sparsity, seed)?;
            let fit = spls_fit(data, t.eta, t.k)?;
            Selected { support: fit.active_set, k: t.k, eta: Some(t.eta) }
        }
        Method::SplsBootYt => {
            let t = tune_bootyt_with(data, &settings.sparsity, &settings.stopping, seed)?;
            let fit = spls_fit(data, t.eta, t.k)?;
            Selected { support: fit.active_set, k: t.k, eta: Some(t.eta) }
        }
    })
}

/// One dataset of a comparison.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub data: Dataset,
    pub true_support: Option<Vec<usize>>,
    /// Target for cross-validated error; the observed response when absent.
    pub noiseless: Option<Array1<f64>>,
    pub test: Option<(Array2<f64>, Array1<f64>)>,
}

#[derive(Debug, Clone)]
pub enum TrialSource {
    /// The same dataset for every trial; trials differ only in their seeds.
    Fixed(TrialData),
    /// A fresh hidden-groups sample per trial.
    HiddenGroups(HiddenGroupDesign),
}

impl TrialSource {
    fn trial(&self, t: usize) -> Result<TrialData> {
        match self {
            TrialSource::Fixed(d) => Ok(d.clone()),
            TrialSource::HiddenGroups(design) => {
                let sample = gen_hidden_groups(&design.reseeded(derive(design.seed, &[tag::DATA, t as u64])))?;
                Ok(TrialData {
                    data: Dataset::new(sample.x, sample.y, true)?,
                    true_support: Some(sample.true_support),
                    noiseless: Some(sample.y_noiseless),
                    test: None,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationSettings {
    /// Repetitions of the CV error of each method's modal model (new folds each time).
    pub cv_repeats: usize,
    pub folds: usize,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        Self { cv_repeats: 10, folds: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub support: Vec<usize>,
    pub k: usize,
    pub eta: Option<f64>,
    pub accuracy: Option<f64>,
    /// Set when the method failed on this trial.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MethodReport {
    pub method: Method,
    pub outcomes: Vec<TrialOutcome>,
    pub failures: usize,
    pub mean_accuracy: Option<f64>,
    /// Supports and models over successful trials.
    pub stability: Option<StabilityReport>,
    /// Distinct (η, K) pairs and the share of the most frequent one, for SPLS methods.
    pub distinct_tunings: Option<(usize, f64)>,
    /// CV errors of the modal model on the first trial's data.
    pub cv_mse: Vec<f64>,
    /// Prediction error of the modal model on the first trial's test set.
    pub pmse: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub trials: usize,
    pub methods: Vec<MethodReport>,
}

impl ComparisonReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }
}

/// Repeats every method over `trials` datasets and summarizes selections.
///
/// Trial t of method m uses the seed derived from `(seed, m, t)`, so adding or
/// removing methods does not change the others' results.
pub fn run_comparison(
    methods: &[Method],
    settings: &MethodSettings,
    source: &TrialSource,
    trials: usize,
    eval: &EvaluationSettings,
    seed: u64,
) -> Result<ComparisonReport> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let datasets: Vec<TrialData> = match source {
        TrialSource::Fixed(d) => alloc::vec![d.clone()],
        _ => (0..trials).map(|t| source.trial(t)).collect::<Result<_>>()?,
    };
    let data_for = |t: usize| &datasets[t.min(datasets.len() - 1)];

    let mut reports = Vec::with_capacity(methods.len());
    for &method in methods {
        let outcomes: Vec<TrialOutcome> = map_indexed(trials, |t| {
            let td = data_for(t);
            let s = derive(seed, &[tag::METHOD, method.id(), t as u64]);
            match run_method(method, settings, &td.data, s) {
                Ok(sel) => TrialOutcome {
                    trial: t,
                    accuracy: td
                        .true_support
                        .as_ref()
                        .and_then(|truth| accuracy(&sel.support, truth, td.data.p()).ok()),
                    support: sel.support,
                    k: sel.k,
                    eta: sel.eta,
                    error: None,
                },
                Err(e) => TrialOutcome {
                    trial: t,
                    support: Vec::new(),
                    k: 0,
                    eta: None,
                    accuracy: None,
                    error: Some(e.to_string()),
                },
            }
        });
        reports.push(summarize(method, outcomes, data_for(0), eval, seed)?);
    }
    Ok(ComparisonReport { trials, methods: reports })
}

fn summarize(
    method: Method,
    outcomes: Vec<TrialOutcome>,
    first: &TrialData,
    eval: &EvaluationSettings,
    seed: u64,
) -> Result<MethodReport> {
    let ok: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.error.is_none()).collect();
    let failures = outcomes.len() - ok.len();
    let accs: Vec<f64> = ok.iter().filter_map(|o| o.accuracy).collect();
    let mean_accuracy = (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64);
    let keys: Vec<ModelKey> = ok.iter().map(|o| ModelKey { support: o.support.clone(), k: o.k }).collect();
    let stability = if keys.is_empty() { None } else { Some(stability_report(&keys)?) };

    let distinct_tunings = if method.is_sparse() && !ok.is_empty() {
        let mut counts: BTreeMap<(u64, usize), usize> = BTreeMap::new();
        for o in &ok {
            *counts.entry((o.eta.unwrap_or(f64::NAN).to_bits(), o.k)).or_insert(0) += 1;
        }
        let top = counts.values().copied().max().unwrap_or(0);
        Some((counts.len(), top as f64 / ok.len() as f64))
    } else {
        None
    };

    let mut cv_mse = Vec::new();
    let mut test_error = None;
    if let Some(modal) = stability.as_ref().map(|s| &s.modal_model) {
        if !modal.support.is_empty() && modal.k > 0 {
            let target = match &first.noiseless {
                Some(v) => Target::Values(v.view()),
                None => Target::Observed,
            };
            let folds = eval.folds.min(first.data.n());
            for rep in 0..eval.cv_repeats {
                let s = derive(seed, &[tag::EVAL, method.id(), rep as u64]);
                if let Ok(m) = cv_mse_support(&first.data, &modal.support, modal.k, folds, s, target) {
                    cv_mse.push(m);
                }
            }
            if let Some((xt, yt)) = &first.test {
                test_error = SupportFit::new(&first.data, &modal.support, modal.k)
                    .and_then(|fit| pmse(&fit, xt.view(), yt.view()))
                    .ok();
            }
        }
    }
    Ok(MethodReport {
        method,
        outcomes,
        failures,
        mean_accuracy,
        stability,
        distinct_tunings,
        cv_mse,
        pmse: test_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::designs::{gen_linear_response, surrogate_predictors, LinearResponseDesign, SURROGATE_BETA, SURROGATE_SUPPORT};

    fn small_settings() -> MethodSettings {
        MethodSettings {
            selection: SelectionConfig { replicates: 100, ..SelectionConfig::default() },
            stopping: StoppingConfig { replicates: 100, k_max: 3, ..StoppingConfig::default() },
            sparsity: SparsityConfig { eta_grid: alloc::vec![0.3, 0.7], k_max: 3, folds: 5 },
        }
    }

    fn fixed_source() -> TrialSource {
        let x = surrogate_predictors(60, 1).unwrap();
        let design = LinearResponseDesign {
            x: x.clone(),
            support: SURROGATE_SUPPORT.to_vec(),
            beta: SURROGATE_BETA.to_vec(),
            sigma: 4.0,
        };
        let (y, clean) = gen_linear_response(&design, 2).unwrap();
        TrialSource::Fixed(TrialData {
            data: Dataset::new(x, y, true).unwrap(),
            true_support: Some(SURROGATE_SUPPORT.to_vec()),
            noiseless: Some(clean),
            test: None,
        })
    }

    #[test]
    fn single_trial_report_echoes_the_trial() {
        let eval = EvaluationSettings { cv_repeats: 2, folds: 5 };
        let r = run_comparison(&[Method::SplsCv], &small_settings(), &fixed_source(), 1, &eval, 3).unwrap();
        let m = &r.methods[0];
        let o = &m.outcomes[0];
        let st = m.stability.as_ref().unwrap();
        assert_eq!(st.modal_support, o.support);
        assert_eq!(st.modal_model_rate, 1.0);
        assert_eq!(m.mean_accuracy, o.accuracy);
        assert_eq!(m.distinct_tunings, Some((1, 1.0)));
        assert_eq!(m.cv_mse.len(), 2);
    }

    #[test]
    fn comparison_is_deterministic() {
        let eval = EvaluationSettings { cv_repeats: 1, folds: 5 };
        let design = HiddenGroupDesign::new(40, 40, 0.5, 9).unwrap();
        let src = TrialSource::HiddenGroups(HiddenGroupDesign { r: 2, ..design });
        let a = run_comparison(&[Method::BootYt, Method::SplsCv], &small_settings(), &src, 2, &eval, 5).unwrap();
        let b = run_comparison(&[Method::BootYt, Method::SplsCv], &small_settings(), &src, 2, &eval, 5).unwrap();
        for (x, y) in a.methods.iter().zip(&b.methods) {
            assert_eq!(x.outcomes, y.outcomes);
            assert_eq!(x.cv_mse, y.cv_mse);
        }
        // A method's rows do not depend on which other methods ran.
        let c = run_comparison(&[Method::SplsCv], &small_settings(), &src, 2, &eval, 5).unwrap();
        assert_eq!(c.methods[0].outcomes, a.methods[1].outcomes);
    }

    #[test]
    fn method_labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.label()), Some(m));
        }
    }
}
