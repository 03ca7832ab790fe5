//! Brute-force references for the closed forms.
//!
//! Everything here enumerates outcomes directly and computes `-sum P log2 P`
//! or a probability-weighted sum of delays. Nothing in this module calls the
//! entropy-rate, stationary-law or Bayesian closed forms it is meant to check.

use std::collections::HashMap;

use thiserror::Error;

use crate::bayes::BayesModel;
use crate::markov::{JointModel, JointState, StateId, StationaryDistribution};
use crate::schedule::UpdateSchedule;

/// Default cap on weighted trajectories visited by one enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest age accepted by [`exact_bayes_gaoi`].
pub const MAX_BAYES_AGE: u64 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration would visit more than {budget} trajectories")]
    BudgetExceeded { budget: u64 },
    #[error("trajectory probabilities sum to {0}")]
    MassLeak(f64),
    #[error("age {age} is beyond the enumeration cap {cap}")]
    AgeTooLarge { age: u64, cap: u64 },
    #[error("status {0} is outside the alphabet")]
    UnknownState(usize),
}

/// Trajectory enumerator for a joint model.
#[derive(Debug, Clone)]
pub struct PathEnumerator<'a> {
    model: &'a JointModel,
    budget: u64,
}

struct Walk {
    entropy: f64,
    mass: f64,
    visited: u64,
}

impl<'a> PathEnumerator<'a> {
    pub fn new(model: &'a JointModel) -> Self {
        Self {
            model,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// `H(U_1..U_a | U_0 = u0)` by listing every trajectory of length `a`.
    pub fn conditional_entropy(&self, u0: JointState, a: u64) -> Result<f64, OracleError> {
        if u0.x.0 >= self.model.alphabet_size() {
            return Err(OracleError::UnknownState(u0.x.0));
        }
        let mut walk = Walk {
            entropy: 0.0,
            mass: 0.0,
            visited: 0,
        };
        self.descend(u0, a, 1.0, &mut walk)?;
        if (walk.mass - 1.0).abs() > 1e-12 {
            return Err(OracleError::MassLeak(walk.mass));
        }
        Ok(walk.entropy)
    }

    fn descend(&self, u: JointState, left: u64, prob: f64, walk: &mut Walk) -> Result<(), OracleError> {
        if left == 0 {
            walk.visited += 1;
            if walk.visited > self.budget {
                return Err(OracleError::BudgetExceeded {
                    budget: self.budget,
                });
            }
            walk.mass += prob;
            walk.entropy -= prob * prob.log2();
            return Ok(());
        }
        let q = self.model.change_prob(u.x, u.t);
        if q < 1.0 {
            let stay = JointState { x: u.x, t: u.t + 1 };
            self.descend(stay, left - 1, prob * (1.0 - q), walk)?;
        }
        if q > 0.0 {
            for (y, &py) in self.model.change().row(u.x).iter().enumerate() {
                if py > 0.0 {
                    self.descend(JointState::new(y, 0), left - 1, prob * q * py, walk)?;
                }
            }
        }
        Ok(())
    }
}

/// `H(U^{1:a} | U_0 = u0)` for a joint model.
pub fn exact_conditional_entropy(
    model: &JointModel,
    u0: JointState,
    a: u64,
) -> Result<f64, OracleError> {
    PathEnumerator::new(model).conditional_entropy(u0, a)
}

/// `sum_u mu(u) H(U^{1:a} | U_0 = u)` over the stored support of `dist`.
///
/// Starting points whose dwell level lies past every explicit prefix share
/// the same future law, so their entropies are enumerated once per status.
pub fn exact_ensemble_gaoi(
    model: &JointModel,
    dist: &StationaryDistribution,
    a: u64,
) -> Result<f64, OracleError> {
    let enumerator = PathEnumerator::new(model);
    let mut cache: HashMap<JointState, f64> = HashMap::new();
    let mut total = 0.0;
    for (u, mass) in dist.iter() {
        if mass == 0.0 {
            continue;
        }
        let plateau = model.dwell().law(u.x).prefix.len() as u64;
        let key = JointState {
            x: u.x,
            t: u.t.min(plateau),
        };
        let h = match cache.get(&key) {
            Some(&h) => h,
            None => {
                let h = enumerator.conditional_entropy(key, a)?;
                cache.insert(key, h);
                h
            }
        };
        total += mass * h;
    }
    Ok(total)
}

/// Stationary law of the joint chain by power iteration on the chain with
/// dwell levels `>= levels - 1` lumped into one state. Returns `mu[x][i]`
/// for `i < levels - 1`; the last entry per status holds the lumped mass.
/// Exact in the limit when `levels - 1` is at least every prefix length.
pub fn power_iteration_stationary(model: &JointModel, levels: usize, iterations: usize) -> Vec<Vec<f64>> {
    let n = model.alphabet_size();
    let last = levels - 1;
    let mut mu = vec![vec![1.0 / (n * levels) as f64; levels]; n];
    for _ in 0..iterations {
        let mut next = vec![vec![0.0; levels]; n];
        for x in 0..n {
            for i in 0..levels {
                let m = mu[x][i];
                if m == 0.0 {
                    continue;
                }
                let q = model.change_prob(StateId(x), i as u64);
                next[x][(i + 1).min(last)] += m * (1.0 - q);
                for (y, &py) in model.change().row(StateId(x)).iter().enumerate() {
                    next[y][0] += m * q * py;
                }
            }
        }
        mu = next;
    }
    mu
}

/// Entropy of the change offset over `a` slots starting from status 0:
/// offsets `k = 1..=a` with `p (1-p)^(k-1)` and no change with `(1-p)^a`.
/// The offset identifies the binary trajectory uniquely.
pub fn exact_bayes_gaoi(model: &BayesModel, a: u64) -> Result<f64, OracleError> {
    if a > MAX_BAYES_AGE {
        return Err(OracleError::AgeTooLarge {
            age: a,
            cap: MAX_BAYES_AGE,
        });
    }
    let p = model.p();
    let mut probs = Vec::with_capacity(a as usize + 1);
    let mut stay = 1.0;
    for _ in 0..a {
        probs.push(stay * p);
        stay *= 1.0 - p;
    }
    probs.push(stay);
    let mass: f64 = probs.iter().sum();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(OracleError::MassLeak(mass));
    }
    Ok(probs
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| -q * q.log2())
        .sum())
}

/// Expected delay of the single change, enumerating `theta in [1, T]` and
/// scanning the schedule for the first update sampled at or after `theta`.
pub fn exact_bayes_delay(model: &BayesModel, schedule: &UpdateSchedule) -> f64 {
    let p = model.p();
    let t = schedule.horizon();
    let mut weight = p;
    let mut total = 0.0;
    for theta in 1..=t {
        let detected = schedule
            .updates()
            .iter()
            .find(|u| u.sample >= theta)
            .map_or(t, |u| u.delivery);
        total += weight * (detected - theta) as f64;
        weight *= 1.0 - p;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{validate_model, ChangeKernel, DwellKernel, DwellLaw};

    fn swap(q: f64) -> JointModel {
        validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(q), 2),
        )
        .unwrap()
    }

    fn h2(q: f64) -> f64 {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }

    #[test]
    fn zero_age() {
        assert_eq!(
            exact_conditional_entropy(&swap(0.6), JointState::new(0, 2), 0).unwrap(),
            0.0
        );
        let b = BayesModel::new(0.3).unwrap();
        assert_eq!(exact_bayes_gaoi(&b, 0).unwrap(), 0.0);
    }

    #[test]
    fn swap_entropy_is_linear_in_age() {
        let m = swap(0.6);
        for t in [0, 3] {
            let h = exact_conditional_entropy(&m, JointState::new(1, t), 3).unwrap();
            assert!((h - 3.0 * h2(0.6)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_step_distribution() {
        let m = validate_model(
            ChangeKernel::new(vec![
                vec![0.2, 0.3, 0.5],
                vec![0.5, 0.0, 0.5],
                vec![1.0, 0.0, 0.0],
            ]),
            DwellKernel::homogeneous(DwellLaw::new(vec![0.1, 0.7], 0.4), 3),
        )
        .unwrap();
        let q: f64 = 0.7;
        let probs = [1.0 - q, q * 0.2, q * 0.3, q * 0.5];
        let expected: f64 = probs.iter().map(|&p| -p * p.log2()).sum();
        let h = exact_conditional_entropy(&m, JointState::new(0, 1), 1).unwrap();
        assert!((h - expected).abs() < 1e-14);
    }

    #[test]
    fn budget_is_enforced() {
        let m = swap(0.5);
        let err = PathEnumerator::new(&m)
            .with_budget(10)
            .conditional_entropy(JointState::new(0, 0), 5)
            .unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded { budget: 10 });
    }

    #[test]
    fn bayes_enumeration() {
        let b = BayesModel::new(0.5).unwrap();
        assert!((exact_bayes_gaoi(&b, 2).unwrap() - 1.5).abs() < 1e-15);
        assert!(exact_bayes_gaoi(&b, 21).is_err());
        let s = UpdateSchedule::empty(2);
        assert!((exact_bayes_delay(&b, &s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn power_iteration_swap() {
        let mu = power_iteration_stationary(&swap(0.6), 30, 200);
        for x in 0..2 {
            for i in 0..29 {
                assert!((mu[x][i] - 0.3 * 0.4f64.powi(i as i32)).abs() < 1e-13);
            }
        }
    }
}
