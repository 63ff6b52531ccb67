//! Run manifest: everything needed to regenerate a run's outputs.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub plsboot: &'static str,
    pub plsboot_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub irls_tolerance: f64,
    pub irls_max_iterations: usize,
    pub degenerate_direction: f64,
    pub divergence_factor: f64,
    pub min_finite_replicates: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub config: RunConfig,
    /// Root seed and the seeds derived from it for each stage.
    pub seeds: BTreeMap<String, u64>,
    pub tolerances: Tolerances,
    pub versions: Versions,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    pub created_unix: u64,
}

impl Manifest {
    pub fn new(config: &RunConfig, seeds: BTreeMap<String, u64>, outputs: Vec<String>) -> Self {
        Self {
            command: config.command.name(),
            config: config.clone(),
            seeds,
            tolerances: Tolerances {
                irls_tolerance: plsboot_core::glm::IRLS_TOL,
                irls_max_iterations: plsboot_core::glm::IRLS_MAX_ITER,
                degenerate_direction: plsboot_core::pls::DEGENERATE_TOL,
                divergence_factor: plsboot_core::gpls::DIVERGENCE_FACTOR,
                min_finite_replicates: "max(50, ceil(R/2)), capped at R",
            },
            versions: Versions { plsboot: env!("CARGO_PKG_VERSION"), plsboot_core: plsboot_core::VERSION },
            outputs,
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }
}
