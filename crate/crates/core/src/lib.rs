//! Partial least squares regression with bootstrap-based model selection.
//!
//! The crate covers:
//!
//! * PLS1 regression by NIPALS deflation ([`pls`]) on standardized data ([`dataset`]);
//! * sparse PLS with soft-thresholded directions and two tuning strategies ([`sparse`]);
//! * a pairs-bootstrap engine with BCa and percentile intervals ([`bootstrap`]);
//! * component-count stopping rules: the bootstrap (y, T) criterion and the Q² baseline
//!   ([`stopping`]);
//! * static and dynamic bootstrap predictor selection ([`selection`]);
//! * PLS-logistic regression with a bootstrap divergence guard ([`gpls`]);
//! * simulation designs, evaluation metrics and repeated-trial comparisons ([`sim`]).
//!
//! The crate is `no_std` with `alloc`. The default `std` feature only adds rayon-backed
//! parallel evaluation of bootstrap replicates and trials; results are bit-identical
//! with or without it.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
#![allow(clippy::many_single_char_names, clippy::needless_range_loop)]

extern crate alloc;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bootstrap;
pub mod cv;
pub mod dataset;
mod error;
pub mod glm;
pub mod gpls;
mod linalg;
pub mod model;
pub mod normal;
mod par;
pub mod pls;
pub mod seed;
pub mod selection;
pub mod sim;
pub mod sparse;
pub mod stopping;

pub use bootstrap::{
    bca_interval, percentile_interval, resample_pairs, Acceleration, BootstrapDistribution,
    ConfidenceInterval, IntervalMethod, ResamplePlan,
};
pub use dataset::{standardize, Dataset};
pub use error::{Error, Result};
pub use gpls::{classify_metrics, divergence_guard, gpls_fit, GplsFit, GuardDecision};
pub use model::{ComponentModel, LinearPls, LogisticPls, SparsePls};
pub use pls::{pls_fit, pls_weight, PlsFit};
pub use selection::{
    dynamic_select, stability_report, static_select, ModelKey, SelectionConfig, SelectionResult,
    StabilityReport,
};
pub use sparse::{
    sparse_weight, spls_fit, tune_bootyt, tune_cv, SparseFit, SparsityConfig,
};
pub use stopping::{
    bootyt_select_k, q2_select_k, BootYt, FixedK, Q2Criterion, StoppingConfig, StoppingCriterion,
};
