//! Simulation designs, evaluation metrics and repeated-trial comparisons.

mod comparison;
mod designs;
mod metrics;

pub use comparison::{
    run_comparison, run_method, ComparisonReport, EvaluationSettings, Method, MethodReport, MethodSettings,
    Selected, TrialData, TrialOutcome, TrialSource,
};
pub use designs::{
    gaussian_predictors, gen_hidden_groups, gen_linear_response, gen_logistic_response, signal_variance, surrogate_predictors, HiddenGroupDesign,
    HiddenGroupSample, LinearResponseDesign, SURROGATE_BETA, SURROGATE_SIGNAL_VARIANCE, SURROGATE_SUPPORT,
};
pub use metrics::{accuracy, bss_wss, snr, top_m};
