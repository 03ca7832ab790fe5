//! Command implementations behind the `gaoi` binary.
//!
//! Each command takes an already-loaded [`Experiment`] and returns its
//! report as text, so the binary only maps errors to exit codes.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::Path;

use gaoi_core::markov::{entropy_rate, entropy_rate_homogeneous, prob_change, stationary_distribution, DEFAULT_TAIL_TOL};
use gaoi_core::metrics::{cumulative_aoi, closed_form_aoi, delay_double_sum, gaoi_series_stationary, verify_theorem1, MeanWithError};
use gaoi_core::bayes::{bayes_constant_c, bayes_gaoi_series};
use gaoi_core::oracle::exact_bayes_delay;
use gaoi_core::schedule::random_schedule;
use gaoi_core::{
    derive_stream, run_ensemble, run_ensemble_with_threads, BayesModel, DelayLaw, EnsembleConfig,
    EnsembleError, EnsembleStats, JointModel, ModelError, ModelSpec, PolicySpec, UpdateSchedule,
};
use thiserror::Error;

pub use config::{load_config, parse_config, preset, Experiment, RunSettings, PRESETS};

/// Stream salt for the random schedules used by `verify`.
pub const VERIFY_SALT: u64 = 2;
/// Random schedules per analytic check.
pub const ANALYTIC_SCHEDULES: u64 = 100;
/// Tolerance on analytic identities.
pub const ANALYTIC_TOL: f64 = 1e-9;
/// Relative tolerance between ensemble AoI and scaled delay.
pub const MC_REL_TOL: f64 = 0.02;
/// Standard errors allowed between an ensemble residual and its target.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Model(m) => CliError::Model(m.to_string()),
            EnsembleError::Pool(msg) => CliError::Io(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn stationary_model(exp: &Experiment, what: &str) -> Result<JointModel, CliError> {
    match &exp.model {
        ModelSpec::Stationary(m) => Ok(m.clone()),
        ModelSpec::Bayesian(_) => Err(CliError::Config(format!("{what} needs a stationary model"))),
    }
}

fn bayesian_model(exp: &Experiment, what: &str) -> Result<BayesModel, CliError> {
    match &exp.model {
        ModelSpec::Bayesian(m) => Ok(*m),
        ModelSpec::Stationary(_) => Err(CliError::Config(format!("{what} needs a bayesian model"))),
    }
}

/// Entropy rate, change probability and truncation bound of a stationary model.
pub fn cmd_entropy_rate(exp: &Experiment) -> Result<String, CliError> {
    let model = stationary_model(exp, "entropy-rate")?;
    let dist = stationary_distribution(&model, DEFAULT_TAIL_TOL)?;
    let rate = entropy_rate(&model, &dist);
    let p = prob_change(&dist);
    let mut out = String::new();
    writeln!(out, "entropy rate (bits/slot): {}", rate.bits).unwrap();
    writeln!(out, "P(change per slot): {p}").unwrap();
    writeln!(out, "truncation bound: {}", rate.truncation_bound).unwrap();
    if model.dwell().is_homogeneous() {
        writeln!(out, "homogeneous-dwell form: {}", entropy_rate_homogeneous(&model, &dist)?).unwrap();
    }
    writeln!(out, "entropy_rate,p_change,truncation_bound").unwrap();
    writeln!(out, "{},{p},{}", rate.bits, rate.truncation_bound).unwrap();
    Ok(out)
}

fn ensemble_config(exp: &Experiment, policy: &PolicySpec) -> Result<EnsembleConfig, CliError> {
    let run = exp.run_settings()?;
    Ok(EnsembleConfig {
        model: exp.model.clone(),
        policy: policy.clone(),
        horizon: run.horizon,
        num_paths: run.num_paths,
        base_seed: run.base_seed,
    })
}

fn run(config: &EnsembleConfig, threads: Option<usize>) -> Result<EnsembleStats, CliError> {
    Ok(match threads {
        Some(t) => run_ensemble_with_threads(config, t)?,
        None => run_ensemble(config)?,
    })
}

/// Runs every policy of the experiment.
pub fn run_policies(exp: &Experiment, threads: Option<usize>) -> Result<Vec<EnsembleStats>, CliError> {
    exp.require_policies()?
        .iter()
        .map(|p| run(&ensemble_config(exp, p)?, threads))
        .collect()
}

/// Runs the ensembles and writes `summary.csv` and the per-slot series
/// under `out_dir`. Returns the summary table.
pub fn cmd_simulate(exp: &Experiment, out_dir: &Path, threads: Option<usize>) -> Result<String, CliError> {
    let stats = run_policies(exp, threads)?;
    output::write_outputs(out_dir, &stats)?;
    Ok(output::summary_csv(&stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Thm1,
    Thm2,
}

impl std::str::FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "thm1" => Ok(Theorem::Thm1),
            "thm2" => Ok(Theorem::Thm2),
            other => Err(format!("unknown theorem {other:?}; expected thm1 or thm2")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub text: String,
    pub passed: bool,
}

impl VerifyReport {
    fn new() -> Self {
        Self {
            text: String::new(),
            passed: true,
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        self.passed &= ok;
        let verdict = if ok { "ok" } else { "FAIL" };
        writeln!(self.text, "[{verdict}] {label}: {detail}").unwrap();
    }

    fn note(&mut self, line: String) {
        writeln!(self.text, "      {line}").unwrap();
    }
}

fn analytic_schedules(exp: &Experiment, run: RunSettings) -> Result<Vec<(String, UpdateSchedule)>, CliError> {
    let mut out: Vec<(String, UpdateSchedule)> = (0..ANALYTIC_SCHEDULES)
        .map(|k| {
            let mut rng = derive_stream(run.base_seed, k, VERIFY_SALT);
            (format!("random #{k}"), random_schedule(run.horizon, &mut rng))
        })
        .collect();
    for policy in exp.require_policies()? {
        let config = ensemble_config(exp, &deterministic_variant(policy))?;
        let schedule = config
            .path_schedule(0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        out.push((format!("{} (fixed delay)", policy.label()), schedule));
    }
    Ok(out)
}

/// The same policy with every random delay replaced by the midpoint of its
/// range.
pub fn deterministic_variant(policy: &PolicySpec) -> PolicySpec {
    let fix = |d: &DelayLaw| match *d {
        DelayLaw::Uniform { lo, hi } => DelayLaw::Deterministic(lo + (hi - lo) / 2),
        other => other,
    };
    match policy {
        PolicySpec::Periodic { period, delay } => PolicySpec::Periodic {
            period: *period,
            delay: fix(delay),
        },
        PolicySpec::Greedy { delay } => PolicySpec::Greedy { delay: fix(delay) },
        explicit => explicit.clone(),
    }
}

fn mean_se(m: &gaoi_core::MetricStats) -> MeanWithError {
    MeanWithError {
        mean: m.mean,
        se: m.se,
    }
}

fn verify_thm1(exp: &Experiment, threads: Option<usize>) -> Result<VerifyReport, CliError> {
    let model = stationary_model(exp, "thm1")?;
    let run = exp.run_settings()?;
    let dist = stationary_distribution(&model, DEFAULT_TAIL_TOL)?;
    let rate = entropy_rate(&model, &dist).bits;
    let p = prob_change(&dist);
    let mut report = VerifyReport::new();
    report.note(format!("entropy rate {rate}, P(change) {p}"));

    let schedules = analytic_schedules(exp, run)?;
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for (_, s) in &schedules {
        let aoi = cumulative_aoi(s);
        exact &= aoi == closed_form_aoi(s) && aoi == delay_double_sum(s);
        let gaoi: f64 = gaoi_series_stationary(s, rate).iter().sum();
        let delay = p * delay_double_sum(s) as f64;
        let r = verify_theorem1(
            MeanWithError::exact(gaoi),
            MeanWithError::exact(aoi as f64),
            MeanWithError::exact(delay),
            rate,
            p,
        )
        .map_err(|e| CliError::Model(e.to_string()))?;
        worst = worst.max(r.max_rel_gap());
    }
    report.check(
        "analytic integer identities",
        exact,
        format!("{} schedules", schedules.len()),
    );
    report.check(
        "analytic scaled quantities",
        worst < ANALYTIC_TOL,
        format!("max relative deviation {worst:e} (tol {ANALYTIC_TOL:e})"),
    );

    for stats in run_policies(exp, threads)? {
        let r = verify_theorem1(
            mean_se(&stats.cum_gaoi),
            mean_se(&stats.cum_aoi),
            mean_se(&stats.cum_delay),
            rate,
            p,
        )
        .map_err(|e| CliError::Model(e.to_string()))?;
        let gaoi_part = match (r.gaoi_over_rate, r.rel_gap_gaoi) {
            (Some(g), Some(gap)) => format!("GAoI/rate {} (rel gap {gap:e})", g.mean),
            _ => "GAoI/rate n/a (zero entropy rate)".to_string(),
        };
        report.check(
            &format!("monte carlo {} ({} paths)", stats.policy, stats.num_paths),
            r.rel_gap_delay <= MC_REL_TOL && r.rel_gap_gaoi.is_none_or(|g| g < ANALYTIC_TOL),
            format!(
                "AoI {} ± {}, delay/p {} ± {} (rel gap {:.4}), {gaoi_part}",
                r.aoi.mean, r.aoi.se, r.delay_over_p.mean, r.delay_over_p.se, r.rel_gap_delay
            ),
        );
    }
    Ok(report)
}

fn verify_thm2(exp: &Experiment, threads: Option<usize>) -> Result<VerifyReport, CliError> {
    let model = bayesian_model(exp, "thm2")?;
    let run = exp.run_settings()?;
    let c = bayes_constant_c(&model, run.horizon);
    let slope = model.slope();
    let mut report = VerifyReport::new();
    report.note(format!("h(1)/p {slope}, C({}) {c}", run.horizon));

    let schedules = analytic_schedules(exp, run)?;
    let mut worst: f64 = 0.0;
    for (label, s) in &schedules {
        let gaoi: f64 = bayes_gaoi_series(&model, s).iter().sum();
        let residual = gaoi - slope * exact_bayes_delay(&model, s);
        let dev = (residual - c).abs();
        worst = worst.max(dev);
        if !label.starts_with("random") {
            report.note(format!("{label}: residual {residual}"));
        }
    }
    report.check(
        "analytic residual",
        worst < ANALYTIC_TOL,
        format!("max |residual - C| {worst:e} over {} schedules", schedules.len()),
    );

    let stats = run_policies(exp, threads)?;
    let mut residuals = Vec::new();
    for s in &stats {
        let r = s.residual.expect("bayesian ensembles report a residual");
        let dev = (r.mean - c).abs();
        report.check(
            &format!("monte carlo {} ({} paths)", s.policy, s.num_paths),
            dev <= MC_SIGMAS * r.se,
            format!("residual {} ± {} vs C {c} ({:.2} se)", r.mean, r.se, dev / r.se),
        );
        residuals.push((s.policy, r));
    }
    for i in 0..residuals.len() {
        for j in i + 1..residuals.len() {
            let (a, ra) = residuals[i];
            let (b, rb) = residuals[j];
            let se = ra.se.hypot(rb.se);
            let diff = (ra.mean - rb.mean).abs();
            report.check(
                &format!("residuals {a} vs {b}"),
                diff <= MC_SIGMAS * se,
                format!("difference {diff} ({:.2} combined se)", diff / se),
            );
        }
    }
    Ok(report)
}

/// Analytic and ensemble checks of the selected identity.
pub fn cmd_verify(theorem: Theorem, exp: &Experiment, threads: Option<usize>) -> Result<VerifyReport, CliError> {
    match theorem {
        Theorem::Thm1 => verify_thm1(exp, threads),
        Theorem::Thm2 => verify_thm2(exp, threads),
    }
}
