//! Subcommand implementations. Each writes JSON and long-format CSV files plus a
//! manifest into the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array1;
use plsboot_core::cv::{pmse, SupportFit};
use plsboot_core::gpls::{classify_metrics, gpls_fit_dataset, ClassificationMetrics};
use plsboot_core::glm::Link;
use plsboot_core::seed::{derive, tag};
use plsboot_core::selection::{dynamic_select, static_select, static_select_with, SelectionConfig, SelectionResult};
use plsboot_core::sim::{
    gaussian_predictors, gen_linear_response, gen_logistic_response, run_comparison, surrogate_predictors,
    ComparisonReport, EvaluationSettings, HiddenGroupDesign, LinearResponseDesign, MethodSettings, TrialData,
    TrialSource, SURROGATE_BETA, SURROGATE_SUPPORT,
};
use plsboot_core::sparse::{spls_fit, tune_bootyt_with, tune_cv, SparsityConfig};
use plsboot_core::stopping::{bootyt_trace, q2_trace, BootYt, Q2Criterion, StoppingConfig};
use plsboot_core::{pls_fit, ConfidenceInterval, ComponentModel, Dataset, LinearPls, LogisticPls};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ConfigError, CriterionArg, DesignArg, RunConfig};
use crate::io::{fmt_f64, fmt_opt, load_csv, write_json, write_rows, IoError, Table};
use crate::manifest::Manifest;

/// Derivation tag of per-command seeds.
const COMMAND_TAG: u64 = 0x434d_4421;
/// Bundled logistic data: informative predictors and their coefficients.
const LOGISTIC_SUPPORT: [usize; 2] = [0, 1];
const LOGISTIC_BETA: [f64; 2] = [1.5, -1.5];
const LOGISTIC_P: usize = 50;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("input: {0}")]
    Input(IoError),
    #[error("computation failed: {0}")]
    Compute(#[from] plsboot_core::Error),
    #[error("output: {0}")]
    Output(IoError),
}

impl RunError {
    /// 1 for failures while computing or writing, 2 for bad configuration or input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Input(_) => 2,
            Self::Compute(_) | Self::Output(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Input(_) => "input",
            Self::Compute(_) => "computation",
            Self::Output(_) => "output",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

fn input(e: IoError) -> RunError {
    match e {
        IoError::Core(c) => RunError::Compute(c),
        other => RunError::Input(other),
    }
}

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: Value,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    files: Vec<String>,
    seeds: BTreeMap<String, u64>,
}

/// Data a command works on. `noiseless` and `truth` exist only for generated data.
struct Inputs {
    train: Table,
    test: Option<Table>,
    noiseless: Option<Array1<f64>>,
    truth: Option<Vec<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        let mut seeds = BTreeMap::new();
        seeds.insert("root".to_string(), cfg.args.seed);
        Self { cfg, dir: cfg.args.output_dir.clone(), files: Vec::new(), seeds }
    }

    fn seed(&mut self, name: &str, path: &[u64]) -> u64 {
        let s = derive(self.cfg.args.seed, path);
        self.seeds.insert(name.to_string(), s);
        s
    }

    fn command_seed(&mut self) -> u64 {
        let cmd = self.cfg.command;
        self.seed(cmd.name(), &[COMMAND_TAG, cmd.id()])
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let p = self.path(name);
        write_json(&p, value).map_err(RunError::Output)
    }

    fn csv<I, R, S>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), RunError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let p = self.path(name);
        write_rows(&p, header, rows).map_err(RunError::Output)
    }

    fn stopping(&self) -> StoppingConfig {
        let a = &self.cfg.args;
        StoppingConfig {
            k_max: a.k_max,
            replicates: a.replicates,
            alpha: a.alpha,
            folds: a.folds,
            q2_threshold: a.q2_threshold,
            acceleration: a.acceleration.into(),
        }
    }

    fn selection(&self) -> SelectionConfig {
        let a = &self.cfg.args;
        SelectionConfig { replicates: a.replicates, alpha: a.alpha, acceleration: a.acceleration.into() }
    }

    fn sparsity(&self) -> SparsityConfig {
        let a = &self.cfg.args;
        SparsityConfig { eta_grid: a.eta_grid.clone(), k_max: a.k_max, folds: a.folds }
    }

    fn load_linear(&mut self) -> Result<Inputs, RunError> {
        let a = &self.cfg.args;
        if let Some(path) = &a.data {
            let train = load_csv(path, &a.response).map_err(input)?;
            let test = match &a.test {
                Some(p) => Some(load_csv(p, &a.response).map_err(input)?),
                None => None,
            };
            check_test(&train, test.as_ref())?;
            return Ok(Inputs { train, test, noiseless: None, truth: None });
        }
        let n = a.n.unwrap_or(100);
        let sigma = a.sigma;
        let s = self.seed("data", &[tag::DATA]);
        let x = surrogate_predictors(n, s)?;
        let design =
            LinearResponseDesign { x: x.clone(), support: SURROGATE_SUPPORT.to_vec(), beta: SURROGATE_BETA.to_vec(), sigma };
        let (y, clean) = gen_linear_response(&design, s)?;
        Ok(Inputs { train: Table::unnamed(x, y), test: None, noiseless: Some(clean), truth: Some(SURROGATE_SUPPORT.to_vec()) })
    }

    fn load_binary(&mut self) -> Result<Inputs, RunError> {
        let a = &self.cfg.args;
        if a.data.is_some() {
            return self.load_linear();
        }
        let n = a.n.unwrap_or(300);
        let s = self.seed("data", &[tag::DATA]);
        let x = gaussian_predictors(n, LOGISTIC_P, s);
        let y = gen_logistic_response(x.view(), &LOGISTIC_SUPPORT, &LOGISTIC_BETA, s)?;
        Ok(Inputs { train: Table::unnamed(x, y), test: None, noiseless: None, truth: Some(LOGISTIC_SUPPORT.to_vec()) })
    }

    fn write_data(&mut self, inputs: &Inputs) -> Result<(), RunError> {
        // Generated data is saved so later runs can read it back with --data.
        if self.cfg.args.data.is_none() {
            let p = self.path("data.csv");
            crate::io::save_csv(&p, &inputs.train).map_err(RunError::Output)?;
        }
        Ok(())
    }
}

fn check_test(train: &Table, test: Option<&Table>) -> Result<(), RunError> {
    if let Some(t) = test {
        if t.predictor_names != train.predictor_names {
            return Err(RunError::Input(IoError::Csv("test file columns differ from the training file".into())));
        }
    }
    Ok(())
}

/// Runs one command and writes its outputs.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, RunError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.args.output_dir).map_err(|e| {
        RunError::Output(IoError::Io { path: cfg.args.output_dir.display().to_string(), message: e.to_string() })
    })?;
    let mut ctx = Ctx::new(cfg);
    let summary = match cfg.command {
        Command::Fit => fit(&mut ctx)?,
        Command::SelectStatic | Command::SelectDynamic => select(&mut ctx)?,
        Command::TuneSplsCv => tune_spls_cv(&mut ctx)?,
        Command::TuneSplsBoot => tune_spls_boot(&mut ctx)?,
        Command::Gpls => gpls(&mut ctx)?,
        Command::Simulate | Command::Compare => compare(&mut ctx)?,
    };
    ctx.json("result.json", &summary)?;
    let manifest = Manifest::new(cfg, ctx.seeds.clone(), ctx.files.clone());
    let manifest_path = ctx.dir.join("manifest.json");
    write_json(&manifest_path, &manifest).map_err(RunError::Output)?;
    let mut files = ctx.files;
    files.push("manifest.json".into());
    Ok(RunSummary { command: cfg.command.name(), output_dir: ctx.dir, files, summary })
}

fn choose_k(ctx: &mut Ctx, data: &Dataset) -> Result<(usize, Value), RunError> {
    if let Some(k) = ctx.cfg.args.k {
        return Ok((k.min(data.max_components()), json!({ "rule": "fixed" })));
    }
    let s = ctx.seed("criterion", &[COMMAND_TAG, ctx.cfg.command.id(), tag::CRITERION]);
    let stopping = ctx.stopping();
    Ok(match ctx.cfg.args.criterion {
        CriterionArg::Bootyt => {
            let o = bootyt_trace(&LinearPls, data, &stopping, s)?;
            write_trace(ctx, "ci_trace.csv", None, &o.trace)?;
            (o.k, json!({ "rule": "bootyt", "tests_performed": o.tests_performed, "stop": format!("{:?}", o.reason) }))
        }
        CriterionArg::Q2 => {
            let o = q2_trace(data, &stopping, s)?;
            ctx.csv(
                "q2.csv",
                &["k", "q2"],
                o.q2.iter().enumerate().map(|(i, q)| vec![(i + 1).to_string(), fmt_f64(*q)]),
            )?;
            (o.k, json!({ "rule": "q2", "forced": o.forced }))
        }
    })
}

fn write_trace(
    ctx: &mut Ctx,
    name: &str,
    eta: Option<&[(f64, &[plsboot_core::stopping::CiTraceEntry])]>,
    trace: &[plsboot_core::stopping::CiTraceEntry],
) -> Result<(), RunError> {
    let mut rows = Vec::new();
    let mut push = |eta: Option<f64>, entries: &[plsboot_core::stopping::CiTraceEntry]| {
        for e in entries {
            let mut r = Vec::new();
            if eta.is_some() {
                r.push(fmt_opt(eta));
            }
            r.extend([
                e.k.to_string(),
                e.component.to_string(),
                fmt_f64(e.interval.lo),
                fmt_f64(e.interval.hi),
                e.interval.excludes_zero().to_string(),
            ]);
            rows.push(r);
        }
    };
    match eta {
        Some(groups) => groups.iter().for_each(|(e, t)| push(Some(*e), t)),
        None => push(None, trace),
    }
    let header: &[&str] = if eta.is_some() {
        &["eta", "k", "component", "lo", "hi", "excludes_zero"]
    } else {
        &["k", "component", "lo", "hi", "excludes_zero"]
    };
    ctx.csv(name, header, rows)
}

fn coefficient_rows(names: &[String], beta: &Array1<f64>) -> Vec<Vec<String>> {
    beta.iter().enumerate().map(|(j, b)| vec![j.to_string(), names[j].clone(), fmt_f64(*b)]).collect()
}

fn fit(ctx: &mut Ctx) -> Result<Value, RunError> {
    let inputs = ctx.load_linear()?;
    ctx.write_data(&inputs)?;
    let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
    let (k, rule) = choose_k(ctx, &data)?;
    if k == 0 {
        return Ok(json!({ "k": 0, "selection": rule, "note": "no significant component" }));
    }
    let model = pls_fit(&data, k)?;
    ctx.csv("coefficients.csv", &["predictor", "name", "coefficient"], coefficient_rows(&inputs.train.predictor_names, &model.beta))?;
    let test_pmse = match &inputs.test {
        Some(t) => Some(pmse(&model, t.x.view(), t.y.view())?),
        None => None,
    };
    Ok(json!({
        "k": k,
        "selection": rule,
        "intercept": model.intercept,
        "y_loadings": model.y_loadings.to_vec(),
        "coefficients": model.beta.to_vec(),
        "test_pmse": test_pmse,
    }))
}

fn interval_rows(names: &[String], estimates: &Array1<f64>, intervals: &[ConfidenceInterval]) -> Vec<Vec<String>> {
    intervals
        .iter()
        .enumerate()
        .map(|(j, ci)| {
            vec![
                j.to_string(),
                names[j].clone(),
                fmt_f64(estimates[j]),
                fmt_f64(ci.lo),
                fmt_f64(ci.hi),
                ci.method.label().to_string(),
                ci.excludes_zero().to_string(),
            ]
        })
        .collect()
}

fn write_selection<F>(ctx: &mut Ctx, names: &[String], r: &SelectionResult<F>) -> Result<Value, RunError> {
    ctx.csv(
        "intervals.csv",
        &["predictor", "name", "estimate", "lo", "hi", "method", "selected"],
        interval_rows(names, &r.original_coefficients, &r.intervals),
    )?;
    ctx.csv(
        "k_histogram.csv",
        &["k", "replicates"],
        r.k_histogram.iter().map(|(k, c)| vec![k.to_string(), c.to_string()]),
    )?;
    ctx.csv(
        "support.csv",
        &["predictor", "name"],
        r.support.iter().map(|&j| vec![j.to_string(), names[j].clone()]),
    )?;
    Ok(json!({
        "support": r.support,
        "support_names": r.support.iter().map(|&j| names[j].clone()).collect::<Vec<_>>(),
        "original_k": r.original_k,
        "final_k": r.final_k,
        "k_histogram": r.k_histogram,
        "replicates": r.replicates,
        "excluded_replicates": r.excluded_replicates,
    }))
}

fn select(ctx: &mut Ctx) -> Result<Value, RunError> {
    let inputs = ctx.load_linear()?;
    ctx.write_data(&inputs)?;
    let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
    let names = inputs.train.predictor_names.clone();
    let s = ctx.command_seed();
    let sel = ctx.selection();
    let stopping = ctx.stopping();
    let result = match (ctx.cfg.command, ctx.cfg.args.k, ctx.cfg.args.criterion) {
        (Command::SelectStatic, Some(k), _) => static_select(&LinearPls, &data, k, &sel, s)?,
        (Command::SelectStatic, None, CriterionArg::Bootyt) => {
            static_select_with(&LinearPls, &BootYt { cfg: stopping }, &data, &sel, s)?
        }
        (Command::SelectStatic, None, CriterionArg::Q2) => {
            static_select_with(&LinearPls, &Q2Criterion { cfg: stopping }, &data, &sel, s)?
        }
        (_, _, CriterionArg::Bootyt) => dynamic_select(&LinearPls, &BootYt { cfg: stopping }, &data, &sel, s)?,
        (_, _, CriterionArg::Q2) => dynamic_select(&LinearPls, &Q2Criterion { cfg: stopping }, &data, &sel, s)?,
    };
    let mut out = write_selection(ctx, &names, &result)?;
    if let Some(truth) = &inputs.truth {
        out["true_support"] = json!(truth);
    }
    if let (Some(t), Some(_)) = (&inputs.test, &result.final_fit) {
        let fit = SupportFit::new(&data, &result.support, result.final_k)?;
        out["test_pmse"] = json!(pmse(&fit, t.x.view(), t.y.view())?);
    }
    Ok(out)
}

fn tune_spls_cv(ctx: &mut Ctx) -> Result<Value, RunError> {
    let inputs = ctx.load_linear()?;
    ctx.write_data(&inputs)?;
    let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
    let s = ctx.command_seed();
    let t = tune_cv(&data, &ctx.sparsity(), s)?;
    ctx.csv(
        "cv_table.csv",
        &["eta", "k", "cv_mse"],
        t.table.iter().map(|c| vec![fmt_f64(c.eta), c.k.to_string(), fmt_f64(c.mse)]),
    )?;
    let fit = spls_fit(&data, t.eta, t.k)?;
    ctx.csv("coefficients.csv", &["predictor", "name", "coefficient"], coefficient_rows(&inputs.train.predictor_names, &fit.beta))?;
    Ok(json!({
        "eta": t.eta,
        "k": t.k,
        "effective_k": fit.k,
        "active_set": fit.active_set,
        "models_evaluated": t.models_evaluated,
    }))
}

fn tune_spls_boot(ctx: &mut Ctx) -> Result<Value, RunError> {
    let inputs = ctx.load_linear()?;
    ctx.write_data(&inputs)?;
    let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
    let s = ctx.command_seed();
    let t = tune_bootyt_with(&data, &ctx.sparsity(), &ctx.stopping(), s)?;
    ctx.csv(
        "per_eta.csv",
        &["eta", "k", "cv_mse", "tests_performed", "dropped"],
        t.per_eta.iter().map(|e| {
            vec![
                fmt_f64(e.eta),
                e.k.to_string(),
                fmt_opt(e.cv_mse),
                e.tests_performed.to_string(),
                e.dropped.clone().unwrap_or_default(),
            ]
        }),
    )?;
    let groups: Vec<(f64, &[plsboot_core::stopping::CiTraceEntry])> =
        t.per_eta.iter().map(|e| (e.eta, e.trace.as_slice())).collect();
    write_trace(ctx, "ci_trace.csv", Some(&groups), &[])?;
    let fit = spls_fit(&data, t.eta, t.k)?;
    ctx.csv("coefficients.csv", &["predictor", "name", "coefficient"], coefficient_rows(&inputs.train.predictor_names, &fit.beta))?;
    Ok(json!({
        "eta": t.eta,
        "k": t.k,
        "effective_k": fit.k,
        "active_set": fit.active_set,
        "models_evaluated": t.models_evaluated,
    }))
}

fn metrics_json(m: &ClassificationMetrics) -> Value {
    json!({ "misclassified": m.misclassified, "mse": m.mse })
}

fn gpls(ctx: &mut Ctx) -> Result<Value, RunError> {
    let inputs = ctx.load_binary()?;
    ctx.write_data(&inputs)?;
    let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
    let (k, rule) = match ctx.cfg.args.k {
        Some(k) => (k.min(LogisticPls.max_components(&data)), json!({ "rule": "fixed" })),
        None => {
            let s = ctx.seed("criterion", &[COMMAND_TAG, ctx.cfg.command.id(), tag::CRITERION]);
            let o = bootyt_trace(&LogisticPls, &data, &ctx.stopping(), s)?;
            write_trace(ctx, "ci_trace.csv", None, &o.trace)?;
            (o.k, json!({ "rule": "bootyt", "tests_performed": o.tests_performed }))
        }
    };
    if k == 0 {
        return Ok(json!({ "k": 0, "selection": rule, "note": "no significant component" }));
    }
    let fit = gpls_fit_dataset(&data, k, Link::Logit)?;
    ctx.csv("coefficients.csv", &["predictor", "name", "coefficient"], coefficient_rows(&inputs.train.predictor_names, &fit.beta))?;
    let train = classify_metrics(&fit, inputs.train.x.view(), inputs.train.y.view())?;
    let test = match &inputs.test {
        Some(t) => Some(metrics_json(&classify_metrics(&fit, t.x.view(), t.y.view())?)),
        None => None,
    };
    Ok(json!({
        "k": k,
        "selection": rule,
        "intercept": fit.intercept,
        "component_coefficients": fit.gamma.to_vec(),
        "coefficients": fit.beta.to_vec(),
        "converged": fit.converged,
        "deviance": fit.deviance,
        "train": metrics_json(&train),
        "test": test,
    }))
}

fn compare(ctx: &mut Ctx) -> Result<Value, RunError> {
    let a = &ctx.cfg.args;
    let methods = ctx.cfg.methods()?;
    let settings = MethodSettings { selection: ctx.selection(), stopping: ctx.stopping(), sparsity: ctx.sparsity() };
    let trials = a.trials;
    let eval = EvaluationSettings { cv_repeats: a.cv_repeats, folds: a.folds };
    let hidden = ctx.cfg.command == Command::Simulate && a.design == DesignArg::HiddenGroups;
    let (source, p) = if hidden {
        let s = ctx.seed("data", &[tag::DATA]);
        let design = HiddenGroupDesign::new(a.n.unwrap_or(100), a.p, a.q_ratio, s)?;
        (TrialSource::HiddenGroups(design), a.p)
    } else {
        let inputs = ctx.load_linear()?;
        ctx.write_data(&inputs)?;
        let data = inputs.train.dataset(ctx.cfg.scale()).map_err(input)?;
        let p = data.p();
        let test = inputs.test.map(|t| (t.x, t.y));
        (TrialSource::Fixed(TrialData { data, true_support: inputs.truth, noiseless: inputs.noiseless, test }), p)
    };
    let s = ctx.command_seed();
    let report = run_comparison(&methods, &settings, &source, trials, &eval, s)?;
    write_comparison(ctx, &report, hidden.then_some((a.p, a.q_ratio)))?;
    Ok(json!({
        "trials": trials,
        "p": p,
        "methods": report.methods.iter().map(|m| json!({
            "method": m.method.label(),
            "failures": m.failures,
            "mean_accuracy": m.mean_accuracy,
            "distinct_supports": m.stability.as_ref().map(|s| s.distinct_supports),
            "modal_support": m.stability.as_ref().map(|s| s.modal_support.clone()),
            "modal_k": m.stability.as_ref().map(|s| s.modal_model.k),
        })).collect::<Vec<_>>(),
    }))
}

fn write_comparison(ctx: &mut Ctx, report: &ComparisonReport, design: Option<(usize, f64)>) -> Result<(), RunError> {
    let (p, q) = design.map_or((String::new(), String::new()), |(p, q)| (p.to_string(), fmt_f64(q)));
    let mut trials = Vec::new();
    for m in &report.methods {
        for o in &m.outcomes {
            trials.push(vec![
                m.method.label().to_string(),
                p.clone(),
                q.clone(),
                o.trial.to_string(),
                fmt_opt(o.accuracy),
                o.support.len().to_string(),
                o.k.to_string(),
                fmt_opt(o.eta),
                o.support.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" "),
                o.error.clone().unwrap_or_default(),
            ]);
        }
    }
    ctx.csv(
        "trials.csv",
        &["method", "p", "q_ratio", "trial", "accuracy", "support_size", "k", "eta", "support", "error"],
        trials,
    )?;
    let summary = report.methods.iter().map(|m| {
        let st = m.stability.as_ref();
        let mean_cv = (!m.cv_mse.is_empty()).then(|| m.cv_mse.iter().sum::<f64>() / m.cv_mse.len() as f64);
        vec![
            m.method.label().to_string(),
            p.clone(),
            q.clone(),
            m.outcomes.len().to_string(),
            m.failures.to_string(),
            fmt_opt(m.mean_accuracy),
            st.map_or(String::new(), |s| s.distinct_supports.to_string()),
            st.map_or(String::new(), |s| fmt_f64(s.modal_support_rate)),
            st.map_or(String::new(), |s| s.modal_support.len().to_string()),
            st.map_or(String::new(), |s| s.distinct_models.to_string()),
            st.map_or(String::new(), |s| fmt_f64(s.modal_model_rate)),
            st.map_or(String::new(), |s| s.modal_model.k.to_string()),
            m.distinct_tunings.map_or(String::new(), |(d, _)| d.to_string()),
            fmt_opt(mean_cv),
            fmt_opt(m.pmse),
        ]
    });
    ctx.csv(
        "summary.csv",
        &[
            "method",
            "p",
            "q_ratio",
            "trials",
            "failures",
            "mean_accuracy",
            "distinct_supports",
            "modal_support_rate",
            "modal_support_size",
            "distinct_models",
            "modal_model_rate",
            "modal_k",
            "distinct_tunings",
            "mean_cv_mse",
            "pmse",
        ],
        summary,
    )
}

/// Directory relative paths are resolved against; exposed for tests.
pub fn output_path(summary: &RunSummary, file: &str) -> PathBuf {
    Path::new(&summary.output_dir).join(file)
}
