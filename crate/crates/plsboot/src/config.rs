//! Command-line arguments and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plsboot_core::sim::Method;
use plsboot_core::Acceleration;
use serde::Serialize;

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "PLSBOOT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "plsboot", version, about = "PLS regression with bootstrap-based component and predictor selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Debug, Subcommand)]
pub enum CommandLine {
    /// Fit a PLS model with K given or chosen by a stopping criterion.
    Fit(RunArgs),
    /// Bootstrap predictor selection with the same K on every replicate.
    SelectStatic(RunArgs),
    /// Bootstrap predictor selection with K chosen inside every replicate.
    SelectDynamic(RunArgs),
    /// Tune sparse PLS (η, K) by cross-validation.
    TuneSplsCv(RunArgs),
    /// Tune sparse PLS with the bootstrap criterion choosing K for each η.
    TuneSplsBoot(RunArgs),
    /// Fit PLS-logistic regression on a 0/1 response.
    Gpls(RunArgs),
    /// Repeated selection on freshly simulated data.
    Simulate(RunArgs),
    /// Repeated selection by several methods on one dataset.
    Compare(RunArgs),
}

impl CommandLine {
    pub fn into_config(self) -> RunConfig {
        let (command, args) = match self {
            Self::Fit(a) => (Command::Fit, a),
            Self::SelectStatic(a) => (Command::SelectStatic, a),
            Self::SelectDynamic(a) => (Command::SelectDynamic, a),
            Self::TuneSplsCv(a) => (Command::TuneSplsCv, a),
            Self::TuneSplsBoot(a) => (Command::TuneSplsBoot, a),
            Self::Gpls(a) => (Command::Gpls, a),
            Self::Simulate(a) => (Command::Simulate, a),
            Self::Compare(a) => (Command::Compare, a),
        };
        RunConfig { command, args }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fit,
    SelectStatic,
    SelectDynamic,
    TuneSplsCv,
    TuneSplsBoot,
    Gpls,
    Simulate,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fit => "fit",
            Self::SelectStatic => "select-static",
            Self::SelectDynamic => "select-dynamic",
            Self::TuneSplsCv => "tune-spls-cv",
            Self::TuneSplsBoot => "tune-spls-boot",
            Self::Gpls => "gpls",
            Self::Simulate => "simulate",
            Self::Compare => "compare",
        }
    }

    /// Seed-derivation index of the command.
    pub fn id(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    Bootyt,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AccelerationArg {
    Jackknife,
    Zero,
}

impl From<AccelerationArg> for Acceleration {
    fn from(a: AccelerationArg) -> Self {
        match a {
            AccelerationArg::Jackknife => Acceleration::Jackknife,
            AccelerationArg::Zero => Acceleration::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DesignArg {
    /// Blocks of noisy copies of four hidden variables.
    HiddenGroups,
    /// Correlated 100-column matrix with four planted predictors.
    Surrogate,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// CSV with a header row. Without it a synthetic dataset is generated.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Held-out CSV with the same columns, for prediction error.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Bootstrap replicates.
    #[arg(long = "R", visible_alias = "replicates", default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    /// Fixed number of components (otherwise chosen by --criterion).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub eta_grid: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = "plsboot-out")]
    pub output_dir: PathBuf,
    /// Centre predictors without scaling them to unit variance.
    #[arg(long)]
    pub no_scale: bool,
    #[arg(long, value_enum, default_value_t = CriterionArg::Bootyt)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = AccelerationArg::Jackknife)]
    pub acceleration: AccelerationArg,
    #[arg(long, default_value_t = 0.0975)]
    pub q2_threshold: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = DesignArg::HiddenGroups)]
    pub design: DesignArg,
    /// Observations of generated data.
    #[arg(long)]
    pub n: Option<usize>,
    /// Predictors of the hidden-groups design.
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    /// Share of spurious predictors in the hidden-groups design.
    #[arg(long = "qratio", default_value_t = 0.95)]
    pub q_ratio: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Noise standard deviation of the surrogate design.
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
    /// Comma-separated methods: Q2, BootYT, BootYTdyn, SPLS-CV, SPLS-BootYT.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// CV repetitions for each method's modal model.
    #[arg(long, default_value_t = 10)]
    pub cv_repeats: usize,
}

/// A parsed command with its arguments.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(flatten)]
    pub args: RunArgs,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl RunConfig {
    pub fn scale(&self) -> bool {
        !self.args.no_scale
    }

    /// Checks every field the command uses before anything is computed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let a = &self.args;
        if a.replicates == 0 {
            return Err(bad("--R must be positive"));
        }
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(bad("--alpha must lie in (0, 1)"));
        }
        if a.k_max == 0 {
            return Err(bad("--k-max must be positive"));
        }
        if a.k == Some(0) {
            return Err(bad("--k must be positive"));
        }
        if a.folds < 2 {
            return Err(bad("--folds must be at least 2"));
        }
        if !a.q2_threshold.is_finite() {
            return Err(bad("--q2-threshold must be finite"));
        }
        if a.threads == Some(0) {
            return Err(bad("--threads must be positive"));
        }
        if a.n.is_some_and(|n| n < 2) {
            return Err(bad("--n must be at least 2"));
        }
        if a.test.is_some() && a.data.is_none() {
            return Err(bad("--test requires --data"));
        }
        match self.command {
            Command::TuneSplsCv | Command::TuneSplsBoot | Command::Simulate | Command::Compare => {
                if a.eta_grid.is_empty() {
                    return Err(bad("--eta-grid must not be empty"));
                }
                if a.eta_grid.iter().any(|e| !(0.0..1.0).contains(e)) {
                    return Err(bad("--eta-grid values must lie in [0, 1)"));
                }
                if a.eta_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad("--eta-grid must be strictly ascending"));
                }
            }
            _ => {}
        }
        if self.command == Command::TuneSplsBoot && a.replicates < 100 {
            return Err(bad("tune-spls-boot needs --R of at least 100"));
        }
        if self.command == Command::Gpls && a.criterion == CriterionArg::Q2 {
            return Err(bad("the Q2 criterion is only available for linear PLS"));
        }
        if matches!(self.command, Command::Simulate | Command::Compare) {
            if a.trials == 0 {
                return Err(bad("--trials must be positive"));
            }
            self.methods()?;
        }
        if self.command == Command::Simulate {
            if a.data.is_some() {
                return Err(bad("simulate generates its own data; use compare for a file"));
            }
            if a.design == DesignArg::HiddenGroups && !(a.q_ratio > 0.0 && a.q_ratio < 1.0) {
                return Err(bad("--qratio must lie in (0, 1)"));
            }
        }
        if !(a.sigma > 0.0 && a.sigma.is_finite()) {
            return Err(bad("--sigma must be positive"));
        }
        Ok(())
    }

    /// Methods to compare; the defaults depend on the command and design.
    pub fn methods(&self) -> Result<Vec<Method>, ConfigError> {
        if self.args.methods.is_empty() {
            return Ok(match (self.command, self.args.design) {
                (Command::Simulate, DesignArg::HiddenGroups) => vec![Method::BootYtDyn, Method::SplsCv],
                _ => Method::ALL.to_vec(),
            });
        }
        let mut out = Vec::new();
        for m in &self.args.methods {
            let parsed = Method::parse(m).ok_or_else(|| bad(format!("unknown method {m:?}")))?;
            if !out.contains(&parsed) {
                out.push(parsed);
            }
        }
        Ok(out)
    }
}
