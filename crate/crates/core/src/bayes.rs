//! Single change point with a geometric prior.
//!
//! The status starts at 0 and jumps to the absorbing status 1 at slot
//! `theta`, with `P[theta = k] = p (1 - p)^(k - 1)`. Before the change the
//! monitor's uncertainty over the next `a` slots is the entropy of the
//! change offset,
//!
//! ```text
//! h(a) = H(p, (1-p) p, ..., (1-p)^(a-1) p, (1-p)^a) = (1 - (1-p)^a) / p * h(1)
//! ```
//!
//! and after the change there is nothing left to learn.
//!
//! Slot accounting for the cumulative GAoI runs over `n in [1, T]`, and the
//! update delivered at `d_i` is first used in slot `d_i + 1`.

use rand::Rng;
use thiserror::Error;

use crate::markov::{binary_entropy, StateId};
use crate::metrics::SamplePath;
use crate::schedule::UpdateSchedule;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BayesError {
    #[error("change hazard must lie in (0, 1), got {0}")]
    BadHazard(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesModel {
    p: f64,
}

impl BayesModel {
    pub fn new(p: f64) -> Result<Self, BayesError> {
        if p > 0.0 && p < 1.0 {
            Ok(Self { p })
        } else {
            Err(BayesError::BadHazard(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `(1 - p)^k`: probability of no change during `k` slots.
    pub fn survival(&self, k: u64) -> f64 {
        match i32::try_from(k) {
            Ok(k) => (1.0 - self.p).powi(k),
            Err(_) => (1.0 - self.p).powf(k as f64),
        }
    }

    /// `h(1) = H(p, 1 - p)`.
    pub fn h1(&self) -> f64 {
        binary_entropy(self.p)
    }

    /// `h(1) / p`, the slope relating cumulative GAoI to expected delay.
    pub fn slope(&self) -> f64 {
        self.h1() / self.p
    }

    /// Draws `theta` and returns the path over `[1, horizon]`.
    pub fn sample_path<R: Rng + ?Sized>(&self, horizon: u64, rng: &mut R) -> SamplePath {
        let mut states = Vec::with_capacity(horizon as usize);
        let mut dwell = Vec::with_capacity(horizon as usize);
        let (mut x, mut t) = (0usize, 0u64);
        for _ in 0..horizon {
            if x == 0 && rng.random::<f64>() < self.p {
                x = 1;
                t = 0;
            } else {
                t += 1;
            }
            states.push(StateId(x));
            dwell.push(t);
        }
        SamplePath::new((StateId(0), 0), states, dwell).expect("constructed path is consistent")
    }
}

/// `h(x) = (1 - (1-p)^x) / p * H(p, 1 - p)`.
pub fn h_closed(model: &BayesModel, x: u64) -> f64 {
    (1.0 - model.survival(x)) / model.p * model.h1()
}

/// State-dependent GAoI at age `age` given the last delivered status.
pub fn bayes_gaoi(model: &BayesModel, age: u64, observed_state: StateId) -> f64 {
    if observed_state.0 == 0 {
        h_closed(model, age)
    } else {
        0.0
    }
}

/// Expected GAoI per slot `n in [1, T]` for a fixed schedule, averaged over
/// the status seen in the last delivered update:
/// `(1-p)^{delta(n)} h(n - delta(n))`.
pub fn bayes_gaoi_series(model: &BayesModel, schedule: &UpdateSchedule) -> Vec<f64> {
    (1..=schedule.horizon())
        .map(|n| {
            let delta = schedule.freshest_sample(n - 1);
            model.survival(delta) * h_closed(model, n - delta)
        })
        .collect()
}

/// `sum_{n=1}^{T} Phi(n)` in closed form:
///
/// ```text
/// h(1)/p * [ (1-p)((1-p)^T - 1)/p + sum_{i=0}^{K} (d_{i+1} - d_i)(1-p)^{s_i} ]
/// ```
pub fn bayes_cumulative_gaoi(model: &BayesModel, schedule: &UpdateSchedule) -> f64 {
    let p = model.p;
    let t = schedule.horizon();
    let head = (1.0 - p) * (model.survival(t) - 1.0) / p;
    model.slope() * (head + weighted_gaps(model, schedule))
}

/// `sum_{i=0}^{K} (d_{i+1} - d_i)(1-p)^{s_i}`.
fn weighted_gaps(model: &BayesModel, schedule: &UpdateSchedule) -> f64 {
    (0..=schedule.len())
        .map(|i| {
            let gap = schedule.delivery(i + 1) - schedule.delivery(i);
            gap as f64 * model.survival(schedule.sample(i))
        })
        .sum()
}

/// `sum_{k=1}^{T} k (1-p)^{k-1} p`.
fn truncated_mean(model: &BayesModel, t: u64) -> f64 {
    (1..=t)
        .map(|k| k as f64 * model.survival(k - 1) * model.p)
        .sum()
}

/// Expected detection delay of the single change, truncated at the horizon:
///
/// ```text
/// -T(1-p)^T - sum_{k=1}^{T} k(1-p)^{k-1} p + sum_{i=0}^{K} (d_{i+1} - d_i)(1-p)^{s_i}
/// ```
pub fn bayes_expected_delay(model: &BayesModel, schedule: &UpdateSchedule) -> f64 {
    let t = schedule.horizon();
    -(t as f64) * model.survival(t) - truncated_mean(model, t) + weighted_gaps(model, schedule)
}

/// Schedule-independent offset `C(T)` in
/// `cumulative GAoI = h(1)/p * expected delay + C(T)`.
pub fn bayes_constant_c(model: &BayesModel, horizon: u64) -> f64 {
    let p = model.p;
    let head = (1.0 - p) * (model.survival(horizon) - 1.0) / p;
    model.slope()
        * (head + horizon as f64 * model.survival(horizon) + truncated_mean(model, horizon))
}
