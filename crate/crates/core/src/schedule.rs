//! Update schedules and state-independent online policies.
//!
//! A schedule over horizon `T` is the list of delivered updates
//! `(s_1, d_1), ..., (s_K, d_K)` with implicit end caps `s_0 = d_0 = 0` and
//! `s_{K+1} = d_{K+1} = T`. The monitor knows the status at time 0, which is
//! the `(0, 0)` cap. Policies only see the random stream handed to them and
//! never a sample path.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("update {index} delivered at {delivery} before it was sampled at {sample}")]
    DeliveredBeforeSampled {
        index: usize,
        sample: u64,
        delivery: u64,
    },
    #[error("sampling times must be strictly increasing inside (0, T); update {index} has s = {sample}")]
    SampleOrder { index: usize, sample: u64 },
    #[error("delivery times must be strictly increasing and at most T; update {index} has d = {delivery}")]
    DeliveryOrder { index: usize, delivery: u64 },
    #[error("periodic policy needs a period of at least 1")]
    ZeroPeriod,
    #[error("uniform delay range [{lo}, {hi}] is empty")]
    EmptyDelayRange { lo: u64, hi: u64 },
}

/// One delivered update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Update {
    pub sample: u64,
    pub delivery: u64,
}

impl Update {
    pub fn new(sample: u64, delivery: u64) -> Self {
        Self { sample, delivery }
    }
}

/// Validated, stale-free list of delivered updates over `[0, T]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateSchedule {
    horizon: u64,
    updates: Vec<Update>,
}

impl UpdateSchedule {
    /// Checks `0 < s_1 < ... < s_K < T`, `d_1 < ... < d_K <= T` and
    /// `s_i <= d_i`.
    pub fn new(horizon: u64, updates: Vec<Update>) -> Result<Self, ScheduleError> {
        let mut prev = Update::new(0, 0);
        for (index, u) in updates.iter().enumerate() {
            if u.delivery < u.sample {
                return Err(ScheduleError::DeliveredBeforeSampled {
                    index,
                    sample: u.sample,
                    delivery: u.delivery,
                });
            }
            if u.sample <= prev.sample || u.sample >= horizon {
                return Err(ScheduleError::SampleOrder {
                    index,
                    sample: u.sample,
                });
            }
            if (index > 0 && u.delivery <= prev.delivery) || u.delivery > horizon {
                return Err(ScheduleError::DeliveryOrder {
                    index,
                    delivery: u.delivery,
                });
            }
            prev = *u;
        }
        Ok(Self { horizon, updates })
    }

    /// Schedule with no deliveries.
    pub fn empty(horizon: u64) -> Self {
        Self {
            horizon,
            updates: Vec::new(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn updates(&self) -> &[Update] {
        &self.updates
    }

    /// `K`.
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    /// `s_i` for `i in 0..=K+1` including both end caps.
    pub fn sample(&self, i: usize) -> u64 {
        match i {
            0 => 0,
            i if i <= self.updates.len() => self.updates[i - 1].sample,
            _ => self.horizon,
        }
    }

    /// `d_i` for `i in 0..=K+1` including both end caps.
    pub fn delivery(&self, i: usize) -> u64 {
        match i {
            0 => 0,
            i if i <= self.updates.len() => self.updates[i - 1].delivery,
            _ => self.horizon,
        }
    }

    /// `(s_i, d_i)` for `i = 0..=K+1`.
    pub fn capped(&self) -> impl Iterator<Item = Update> + '_ {
        std::iter::once(Update::new(0, 0))
            .chain(self.updates.iter().copied())
            .chain(std::iter::once(Update::new(self.horizon, self.horizon)))
    }

    /// Sampling time of the freshest update delivered at or before slot `n`.
    pub fn freshest_sample(&self, n: u64) -> u64 {
        let idx = self.updates.partition_point(|u| u.delivery <= n);
        if idx == 0 {
            0
        } else {
            self.updates[idx - 1].sample
        }
    }
}

/// Integer delivery delay distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayLaw {
    Deterministic(u64),
    /// Uniform over the integers `lo..=hi`.
    Uniform { lo: u64, hi: u64 },
}

impl DelayLaw {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            DelayLaw::Deterministic(c) => c,
            DelayLaw::Uniform { lo, hi } => rng.random_range(lo..=hi),
        }
    }

    fn validate(&self) -> Result<(), ScheduleError> {
        match *self {
            DelayLaw::Uniform { lo, hi } if lo > hi => {
                Err(ScheduleError::EmptyDelayRange { lo, hi })
            }
            _ => Ok(()),
        }
    }
}

/// State-independent online updating policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySpec {
    /// Sample at `N, 2N, ...`; each update takes an independent delay.
    Periodic { period: u64, delay: DelayLaw },
    /// Sample again as soon as the previous update is delivered, starting at
    /// slot 0.
    Greedy { delay: DelayLaw },
    /// A fixed realization.
    Explicit { updates: Vec<Update> },
}

impl PolicySpec {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            PolicySpec::Periodic { period: 0, .. } => Err(ScheduleError::ZeroPeriod),
            PolicySpec::Periodic { delay, .. } | PolicySpec::Greedy { delay } => delay.validate(),
            PolicySpec::Explicit { updates } => {
                for (index, u) in updates.iter().enumerate() {
                    if u.delivery < u.sample {
                        return Err(ScheduleError::DeliveredBeforeSampled {
                            index,
                            sample: u.sample,
                            delivery: u.delivery,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Periodic { .. } => "periodic",
            PolicySpec::Greedy { .. } => "greedy",
            PolicySpec::Explicit { .. } => "explicit",
        }
    }
}

/// Realizes a policy over `[0, horizon]`. Updates sampled at or after the
/// horizon or still in flight at the horizon are dropped, then stale updates
/// are removed.
pub fn generate_schedule<R: Rng + ?Sized>(
    policy: &PolicySpec,
    horizon: u64,
    rng: &mut R,
) -> Result<UpdateSchedule, ScheduleError> {
    policy.validate()?;
    let mut raw = Vec::new();
    match policy {
        PolicySpec::Periodic { period, delay } => {
            let mut s = *period;
            while s < horizon {
                raw.push(Update::new(s, s + delay.draw(rng)));
                s += period;
            }
        }
        PolicySpec::Greedy { delay } => {
            let mut s = 0;
            while s < horizon {
                let d = s + delay.draw(rng);
                raw.push(Update::new(s, d));
                // at most one sample per slot when delivery is instantaneous
                s = d.max(s + 1);
            }
        }
        PolicySpec::Explicit { updates } => raw.extend_from_slice(updates),
    }
    filter_stale(horizon, raw)
}

/// Orders updates by delivery and drops every update whose sample is not
/// fresher than what the monitor already holds, including the time-0
/// knowledge. On equal delivery times the freshest sample wins. Updates
/// sampled at or after `horizon` or delivered after it are discarded.
pub fn filter_stale(horizon: u64, mut raw: Vec<Update>) -> Result<UpdateSchedule, ScheduleError> {
    for (index, u) in raw.iter().enumerate() {
        if u.delivery < u.sample {
            return Err(ScheduleError::DeliveredBeforeSampled {
                index,
                sample: u.sample,
                delivery: u.delivery,
            });
        }
    }
    raw.retain(|u| u.sample < horizon && u.delivery <= horizon);
    raw.sort_by(|a, b| a.delivery.cmp(&b.delivery).then(b.sample.cmp(&a.sample)));
    let mut freshest = 0;
    let mut kept = Vec::with_capacity(raw.len());
    for u in raw {
        if u.sample > freshest {
            freshest = u.sample;
            kept.push(u);
        }
    }
    UpdateSchedule::new(horizon, kept)
}

/// A random valid schedule, used by identity checks and tests.
pub fn random_schedule<R: Rng + ?Sized>(horizon: u64, rng: &mut R) -> UpdateSchedule {
    if horizon < 2 {
        return UpdateSchedule::empty(horizon);
    }
    let attempts = rng.random_range(0..=horizon.min(40));
    let max_delay = rng.random_range(0..=horizon / 2);
    let raw = (0..attempts)
        .map(|_| {
            let s = rng.random_range(1..horizon);
            Update::new(s, s + rng.random_range(0..=max_delay))
        })
        .collect();
    filter_stale(horizon, raw).expect("generated updates satisfy s <= d")
}

/// Per-slot age `a_n = n - delta(n)` for `n in [0, T - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AoiSeries {
    ages: Vec<u64>,
}

impl AoiSeries {
    pub fn ages(&self) -> &[u64] {
        &self.ages
    }

    pub fn total(&self) -> u64 {
        self.ages.iter().sum()
    }
}

/// Sawtooth age process: `a_n = n - s_j` on `[d_j, d_{j+1})`.
pub fn aoi_series(schedule: &UpdateSchedule) -> AoiSeries {
    let mut ages = Vec::with_capacity(schedule.horizon() as usize);
    let mut next = schedule.updates().iter().peekable();
    let mut fresh = 0;
    for n in 0..schedule.horizon() {
        while let Some(u) = next.next_if(|u| u.delivery <= n) {
            fresh = u.sample;
        }
        ages.push(n - fresh);
    }
    AoiSeries { ages }
}
