//! Experiment configuration files and built-in presets.
//!
//! ```toml
//! [model]
//! kind = "stationary"            # or "bayesian"
//! alphabet_size = 2
//! px_rows = [[0.0, 1.0], [1.0, 0.0]]
//! dwell = { homogeneous = 0.6 }  # or { prefix = [...], tail = q }, or a list of those per status
//! # bayes_p = 0.04               # bayesian only
//!
//! [policy]
//! kind = "periodic"              # "greedy" or "explicit"
//! period = 50
//! delay = { deterministic = 0 }  # or { uniform = [20, 80] }
//! # schedule = "updates.txt"     # explicit only: one "s d" pair per line
//!
//! [run]
//! horizon = 1000
//! num_paths = 1000
//! base_seed = 1
//! ```
//!
//! Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use gaoi_core::markov::{validate_model, ChangeKernel, DwellKernel, DwellLaw};
use gaoi_core::{BayesModel, DelayLaw, ModelSpec, PolicySpec, Update};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: ModelSection,
    policy: Option<PolicySection>,
    run: Option<RunSection>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    Stationary,
    Bayesian,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    kind: ModelKind,
    alphabet_size: Option<usize>,
    px_rows: Option<Vec<Vec<f64>>>,
    dwell: Option<DwellSpec>,
    bayes_p: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawSpec {
    #[serde(default)]
    prefix: Vec<f64>,
    tail: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomogeneousSpec {
    homogeneous: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DwellSpec {
    Homogeneous(HomogeneousSpec),
    Shared(LawSpec),
    PerState(Vec<LawSpec>),
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum PolicyKind {
    Periodic,
    Greedy,
    Explicit,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum DelaySpec {
    Deterministic(u64),
    Uniform([u64; 2]),
}

impl From<DelaySpec> for DelayLaw {
    fn from(d: DelaySpec) -> Self {
        match d {
            DelaySpec::Deterministic(c) => DelayLaw::Deterministic(c),
            DelaySpec::Uniform([lo, hi]) => DelayLaw::Uniform { lo, hi },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicySection {
    kind: PolicyKind,
    period: Option<u64>,
    delay: Option<DelaySpec>,
    schedule: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    horizon: u64,
    num_paths: usize,
    base_seed: u64,
}

/// Horizon, path count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSettings {
    pub horizon: u64,
    pub num_paths: usize,
    pub base_seed: u64,
}

/// A model with one or more policies to compare on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub model: ModelSpec,
    pub policies: Vec<PolicySpec>,
    pub run: Option<RunSettings>,
}

impl Experiment {
    pub fn run_settings(&self) -> Result<RunSettings, CliError> {
        self.run
            .ok_or_else(|| CliError::Config("configuration has no [run] section".into()))
    }

    pub fn require_policies(&self) -> Result<&[PolicySpec], CliError> {
        if self.policies.is_empty() {
            Err(CliError::Config("configuration has no [policy] section".into()))
        } else {
            Ok(&self.policies)
        }
    }

    pub fn with_overrides(mut self, seed: Option<u64>, paths: Option<usize>) -> Self {
        if let Some(run) = self.run.as_mut() {
            if let Some(seed) = seed {
                run.base_seed = seed;
            }
            if let Some(paths) = paths {
                run.num_paths = paths;
            }
        }
        self
    }
}

fn swap_model(q: f64) -> ModelSpec {
    let model = validate_model(
        ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
        DwellKernel::homogeneous(DwellLaw::geometric(q), 2),
    )
    .expect("preset model is valid");
    ModelSpec::Stationary(model)
}

/// Names accepted by `--preset`.
pub const PRESETS: &[&str] = &["fig5", "fig5-fast", "fig6"];

/// Built-in experiments: the two-state symmetric chain with change
/// probability 0.6 (periodic sampling every 50 slots vs. greedy sampling
/// with delays uniform on 20..=80) and the single change point with hazard
/// 0.04 (periodic every 5 slots vs. greedy with delays uniform on 2..=8).
pub fn preset(name: &str) -> Result<Experiment, CliError> {
    let stationary = |paths| Experiment {
        model: swap_model(0.6),
        policies: vec![
            PolicySpec::Periodic {
                period: 50,
                delay: DelayLaw::Deterministic(0),
            },
            PolicySpec::Greedy {
                delay: DelayLaw::Uniform { lo: 20, hi: 80 },
            },
        ],
        run: Some(RunSettings {
            horizon: 1000,
            num_paths: paths,
            base_seed: 1,
        }),
    };
    match name {
        "fig5" => Ok(stationary(1000)),
        "fig5-fast" => Ok(stationary(100)),
        "fig6" => Ok(Experiment {
            model: ModelSpec::Bayesian(BayesModel::new(0.04).expect("preset hazard is valid")),
            policies: vec![
                PolicySpec::Periodic {
                    period: 5,
                    delay: DelayLaw::Deterministic(0),
                },
                PolicySpec::Greedy {
                    delay: DelayLaw::Uniform { lo: 2, hi: 8 },
                },
            ],
            run: Some(RunSettings {
                horizon: 100,
                num_paths: 2000,
                base_seed: 1,
            }),
        }),
        other => Err(CliError::Config(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESETS.join(", ")
        ))),
    }
}

/// Two whitespace-separated integers `s d` per line. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_schedule_text(text: &str) -> Result<Vec<Update>, CliError> {
    let mut updates = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |f: &str| {
            f.parse::<u64>().map_err(|e| {
                CliError::Config(format!("schedule line {}: {f:?}: {e}", lineno + 1))
            })
        };
        match fields.as_slice() {
            [s, d] => updates.push(Update::new(parse(s)?, parse(d)?)),
            _ => {
                return Err(CliError::Config(format!(
                    "schedule line {}: expected two columns \"s d\"",
                    lineno + 1
                )))
            }
        }
    }
    Ok(updates)
}

fn build_model(section: ModelSection) -> Result<ModelSpec, CliError> {
    let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
    match section.kind {
        ModelKind::Bayesian => {
            if section.px_rows.is_some() || section.dwell.is_some() || section.alphabet_size.is_some() {
                return bad("bayesian model takes only bayes_p");
            }
            let p = match section.bayes_p {
                Some(p) => p,
                None => return bad("bayesian model needs bayes_p"),
            };
            BayesModel::new(p)
                .map(ModelSpec::Bayesian)
                .map_err(|e| CliError::Config(e.to_string()))
        }
        ModelKind::Stationary => {
            if section.bayes_p.is_some() {
                return bad("bayes_p is only valid for bayesian models");
            }
            let (Some(rows), Some(dwell)) = (section.px_rows, section.dwell) else {
                return bad("stationary model needs px_rows and dwell");
            };
            let n = section.alphabet_size.unwrap_or(rows.len());
            if rows.len() != n {
                return Err(CliError::Config(format!(
                    "px_rows has {} rows but alphabet_size is {n}",
                    rows.len()
                )));
            }
            let dwell = match dwell {
                DwellSpec::Homogeneous(h) => DwellKernel::homogeneous(DwellLaw::geometric(h.homogeneous), n),
                DwellSpec::Shared(l) => DwellKernel::homogeneous(DwellLaw::new(l.prefix, l.tail), n),
                DwellSpec::PerState(laws) => DwellKernel::new(
                    laws.into_iter()
                        .map(|l| DwellLaw::new(l.prefix, l.tail))
                        .collect(),
                ),
            };
            validate_model(ChangeKernel::new(rows), dwell)
                .map(ModelSpec::Stationary)
                .map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn build_policy(section: PolicySection, base_dir: &Path) -> Result<PolicySpec, CliError> {
    let cfg = |msg: String| CliError::Config(msg);
    let policy = match section.kind {
        PolicyKind::Periodic => {
            if section.schedule.is_some() {
                return Err(cfg("periodic policy does not take a schedule file".into()));
            }
            PolicySpec::Periodic {
                period: section
                    .period
                    .ok_or_else(|| cfg("periodic policy needs period".into()))?,
                delay: section.delay.map_or(DelayLaw::Deterministic(0), Into::into),
            }
        }
        PolicyKind::Greedy => {
            if section.period.is_some() || section.schedule.is_some() {
                return Err(cfg("greedy policy takes only delay".into()));
            }
            PolicySpec::Greedy {
                delay: section
                    .delay
                    .ok_or_else(|| cfg("greedy policy needs delay".into()))?
                    .into(),
            }
        }
        PolicyKind::Explicit => {
            if section.period.is_some() || section.delay.is_some() {
                return Err(cfg("explicit policy takes only schedule".into()));
            }
            let rel = section
                .schedule
                .ok_or_else(|| cfg("explicit policy needs schedule".into()))?;
            let path = base_dir.join(rel);
            let text = fs::read_to_string(&path)
                .map_err(|e| cfg(format!("reading {}: {e}", path.display())))?;
            PolicySpec::Explicit {
                updates: parse_schedule_text(&text)?,
            }
        }
    };
    policy.validate().map_err(|e| cfg(e.to_string()))?;
    Ok(policy)
}

/// Parses a configuration document. Relative schedule paths resolve against
/// `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<Experiment, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let model = build_model(file.model)?;
    let policies = match file.policy {
        Some(p) => vec![build_policy(p, base_dir)?],
        None => Vec::new(),
    };
    let run = file.run.map(|r| RunSettings {
        horizon: r.horizon,
        num_paths: r.num_paths,
        base_seed: r.base_seed,
    });
    if let Some(run) = run {
        if run.horizon == 0 || run.num_paths == 0 {
            return Err(CliError::Config("horizon and num_paths must be positive".into()));
        }
    }
    Ok(Experiment {
        model,
        policies,
        run,
    })
}

pub fn load_config(path: &Path) -> Result<Experiment, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
