//! Monte Carlo ensembles of (path, schedule) pairs.
//!
//! Every path `k` draws from its own ChaCha8 stream keyed by
//! `(base_seed, salt)` and positioned at stream number `k`. Schedules use
//! [`POLICY_SALT`] and paths use [`PATH_SALT`], so a schedule never sees the
//! randomness that drives the status process. Paths are processed in fixed
//! chunks and partial sums are combined in chunk order, which makes the
//! output independent of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bayes::{bayes_constant_c, bayes_cumulative_gaoi, bayes_gaoi_series, BayesModel};
use crate::markov::{
    entropy_rate, prob_change, stationary_distribution, JointModel, JointState, ModelError,
    StationaryDistribution, DEFAULT_TAIL_TOL,
};
use crate::metrics::{detection_delays, PathError, RunSummary, SamplePath};
use crate::schedule::{aoi_series, generate_schedule, PolicySpec, ScheduleError, UpdateSchedule};

pub const PATH_SALT: u64 = 0;
pub const POLICY_SALT: u64 = 1;

/// Paths per work unit.
const CHUNK: usize = 32;

pub type Stream = ChaCha8Rng;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("ensemble needs at least one path")]
    NoPaths,
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for `(base_seed, path_index, salt)`.
pub fn derive_stream(base_seed: u64, path_index: u64, salt: u64) -> Stream {
    let mut key = [0u8; 32];
    let words = [
        splitmix64(base_seed),
        splitmix64(base_seed ^ 0x5555_5555_5555_5555),
        splitmix64(salt),
        splitmix64(salt ^ 0xaaaa_aaaa_aaaa_aaaa),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path_index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Stationary(JointModel),
    Bayesian(BayesModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub model: ModelSpec,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub num_paths: usize,
    pub base_seed: u64,
}

impl EnsembleConfig {
    fn validate(&self) -> Result<(), EnsembleError> {
        if self.num_paths == 0 {
            return Err(EnsembleError::NoPaths);
        }
        if self.horizon == 0 {
            return Err(EnsembleError::EmptyHorizon);
        }
        self.policy.validate()?;
        Ok(())
    }

    /// Schedule realized for path `k`; depends only on the seed, the policy
    /// and `k`.
    pub fn path_schedule(&self, k: u64) -> Result<UpdateSchedule, ScheduleError> {
        let mut rng = derive_stream(self.base_seed, k, POLICY_SALT);
        generate_schedule(&self.policy, self.horizon, &mut rng)
    }
}

/// Draws initial states from a stationary distribution and simulates paths.
#[derive(Debug, Clone)]
pub struct StationarySampler<'a> {
    model: &'a JointModel,
    support: Vec<JointState>,
    cdf: Vec<f64>,
}

impl<'a> StationarySampler<'a> {
    pub fn new(model: &'a JointModel, dist: &StationaryDistribution) -> Self {
        let mut support = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (u, m) in dist.iter() {
            if m > 0.0 {
                acc += m;
                support.push(u);
                cdf.push(acc);
            }
        }
        Self {
            model,
            support,
            cdf,
        }
    }

    pub fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> JointState {
        let total = *self.cdf.last().expect("stationary support is non-empty");
        let r = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= r);
        self.support[idx.min(self.support.len() - 1)]
    }

    /// `(X_0, T_0)` from the stationary law, then `horizon` transitions.
    pub fn sample_path<R: Rng + ?Sized>(
        &self,
        horizon: u64,
        rng: &mut R,
    ) -> Result<SamplePath, EnsembleError> {
        let start = self.initial_state(rng);
        let mut u = start;
        let mut states = Vec::with_capacity(horizon as usize);
        let mut dwell = Vec::with_capacity(horizon as usize);
        for _ in 0..horizon {
            let change: f64 = rng.random();
            let target: f64 = rng.random();
            u = self.model.joint_step(u, change, target)?;
            states.push(u.x);
            dwell.push(u.t);
        }
        Ok(SamplePath::new((start.x, start.t), states, dwell)?)
    }
}

/// Mean and standard error of one per-path metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`; zero for a single path.
    pub se: f64,
    pub count: usize,
}

impl MetricStats {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let se = if count < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        };
        Self { mean, se, count }
    }
}

/// Ensemble averages at one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotAverages {
    pub n: u64,
    pub mean_aoi: f64,
    pub mean_gaoi: f64,
    pub mean_cum_aoi: f64,
    pub mean_cum_gaoi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub policy: &'static str,
    pub num_paths: usize,
    pub horizon: u64,
    /// `P(T_n = 0)` for stationary models.
    pub p_change: Option<f64>,
    /// Entropy rate in bits per slot for stationary models.
    pub entropy_rate: Option<f64>,
    /// `h(1)/p` for the Bayesian model.
    pub slope: Option<f64>,
    /// `C(T)` for the Bayesian model.
    pub constant_c: Option<f64>,
    pub cum_aoi: MetricStats,
    pub cum_gaoi: MetricStats,
    pub cum_delay: MetricStats,
    pub num_changes: MetricStats,
    /// Per-path `cum_gaoi - h(1)/p * cum_delay` for the Bayesian model.
    pub residual: Option<MetricStats>,
    pub series: Vec<SlotAverages>,
}

struct PathOutcome {
    summary: RunSummary,
    residual: Option<f64>,
}

struct Partial {
    outcomes: Vec<PathOutcome>,
    age_sums: Vec<u64>,
    gaoi_sums: Vec<f64>,
}

enum Prepared<'a> {
    Stationary {
        sampler: StationarySampler<'a>,
        rate: f64,
        p_change: f64,
    },
    Bayesian {
        model: BayesModel,
    },
}

impl Prepared<'_> {
    fn run_path(&self, config: &EnsembleConfig, k: u64, partial: &mut Partial) -> Result<(), EnsembleError> {
        let schedule = config.path_schedule(k)?;
        let mut rng = derive_stream(config.base_seed, k, PATH_SALT);
        match self {
            Prepared::Stationary { sampler, rate, .. } => {
                let path = sampler.sample_path(config.horizon, &mut rng)?;
                let summary = RunSummary::stationary(&path, &schedule, *rate)?;
                for (sum, &a) in partial.age_sums.iter_mut().zip(aoi_series(&schedule).ages()) {
                    *sum += a;
                }
                partial.outcomes.push(PathOutcome {
                    summary,
                    residual: None,
                });
            }
            Prepared::Bayesian { model } => {
                let path = model.sample_path(config.horizon, &mut rng);
                let detections = detection_delays(&path, &schedule)?;
                let cum_delay: u64 = detections.iter().map(|d| d.delay).sum();
                let cum_gaoi = bayes_cumulative_gaoi(model, &schedule);
                let mut cum_aoi = 0;
                for (i, sum) in partial.age_sums.iter_mut().enumerate() {
                    let n = i as u64 + 1;
                    let age = n - schedule.freshest_sample(n - 1);
                    *sum += age;
                    cum_aoi += age;
                }
                for (sum, g) in partial
                    .gaoi_sums
                    .iter_mut()
                    .zip(bayes_gaoi_series(model, &schedule))
                {
                    *sum += g;
                }
                partial.outcomes.push(PathOutcome {
                    summary: RunSummary {
                        cum_aoi,
                        cum_gaoi,
                        cum_delay,
                        num_changes: detections.len() as u64,
                    },
                    residual: Some(cum_gaoi - model.slope() * cum_delay as f64),
                });
            }
        }
        Ok(())
    }
}

/// Runs the ensemble on the global rayon pool.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleStats, EnsembleError> {
    config.validate()?;
    let dist;
    let prepared = match &config.model {
        ModelSpec::Stationary(model) => {
            dist = stationary_distribution(model, DEFAULT_TAIL_TOL)?;
            Prepared::Stationary {
                sampler: StationarySampler::new(model, &dist),
                rate: entropy_rate(model, &dist).bits,
                p_change: prob_change(&dist),
            }
        }
        ModelSpec::Bayesian(model) => Prepared::Bayesian { model: *model },
    };

    let slots = config.horizon as usize;
    let chunks: Vec<(usize, usize)> = (0..config.num_paths)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(config.num_paths)))
        .collect();
    let partials = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut partial = Partial {
                outcomes: Vec::with_capacity(end - start),
                age_sums: vec![0; slots],
                gaoi_sums: vec![0.0; slots],
            };
            for k in start..end {
                prepared.run_path(config, k as u64, &mut partial)?;
            }
            Ok(partial)
        })
        .collect::<Result<Vec<Partial>, EnsembleError>>()?;

    let mut age_sums = vec![0u64; slots];
    let mut gaoi_sums = vec![0.0f64; slots];
    let mut outcomes = Vec::with_capacity(config.num_paths);
    for partial in partials {
        for (acc, v) in age_sums.iter_mut().zip(&partial.age_sums) {
            *acc += v;
        }
        for (acc, v) in gaoi_sums.iter_mut().zip(&partial.gaoi_sums) {
            *acc += v;
        }
        outcomes.extend(partial.outcomes);
    }

    let paths = config.num_paths as f64;
    let first_slot = match prepared {
        Prepared::Stationary { .. } => 0,
        Prepared::Bayesian { .. } => 1,
    };
    let mut series = Vec::with_capacity(slots);
    let mut cum_age = 0u64;
    let mut cum_gaoi = 0.0;
    for (i, (&age_sum, &gaoi_sum)) in age_sums.iter().zip(&gaoi_sums).enumerate() {
        cum_age += age_sum;
        let mean_aoi = age_sum as f64 / paths;
        let mean_gaoi = match &prepared {
            Prepared::Stationary { rate, .. } => mean_aoi * rate,
            Prepared::Bayesian { .. } => gaoi_sum / paths,
        };
        cum_gaoi += mean_gaoi;
        series.push(SlotAverages {
            n: first_slot + i as u64,
            mean_aoi,
            mean_gaoi,
            mean_cum_aoi: cum_age as f64 / paths,
            mean_cum_gaoi: cum_gaoi,
        });
    }

    let metric = |f: &dyn Fn(&PathOutcome) -> f64| {
        MetricStats::from_values(&outcomes.iter().map(f).collect::<Vec<_>>())
    };
    let residual = match &prepared {
        Prepared::Bayesian { .. } => Some(metric(&|o| o.residual.unwrap_or(0.0))),
        Prepared::Stationary { .. } => None,
    };
    let (p_change, entropy_rate, slope, constant_c) = match &prepared {
        Prepared::Stationary { rate, p_change, .. } => (Some(*p_change), Some(*rate), None, None),
        Prepared::Bayesian { model } => (
            None,
            None,
            Some(model.slope()),
            Some(bayes_constant_c(model, config.horizon)),
        ),
    };
    Ok(EnsembleStats {
        policy: config.policy.label(),
        num_paths: config.num_paths,
        horizon: config.horizon,
        p_change,
        entropy_rate,
        slope,
        constant_c,
        cum_aoi: metric(&|o| o.summary.cum_aoi as f64),
        cum_gaoi: metric(&|o| o.summary.cum_gaoi),
        cum_delay: metric(&|o| o.summary.cum_delay as f64),
        num_changes: metric(&|o| o.summary.num_changes as f64),
        residual,
        series,
    })
}

/// Runs the ensemble on a dedicated pool with `threads` workers.
pub fn run_ensemble_with_threads(
    config: &EnsembleConfig,
    threads: usize,
) -> Result<EnsembleStats, EnsembleError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EnsembleError::Pool(e.to_string()))?;
    pool.install(|| run_ensemble(config))
}
