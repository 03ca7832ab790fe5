//! Cumulative AoI, GAoI and detection delay.
//!
//! Slot accounting follows the closed forms: cumulative AoI sums the ages on
//! `n in [0, T - 1]`, so with no deliveries it is `T (T - 1) / 2`. A change at
//! slot `n` is detected by the first delivered update sampled at or after
//! `n`; changes not detected by the horizon are charged `T - n`.

use thiserror::Error;

use crate::markov::StateId;
use crate::schedule::{aoi_series, UpdateSchedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("states and dwell counters differ in length ({states} vs {dwell})")]
    LengthMismatch { states: usize, dwell: usize },
    #[error("slot {slot}: status changed but the dwell counter is {dwell}")]
    MissingReset { slot: usize, dwell: u64 },
    #[error("slot {slot}: dwell counter {dwell} neither resets nor increments")]
    BadIncrement { slot: usize, dwell: u64 },
    #[error("path horizon {path} differs from schedule horizon {schedule}")]
    HorizonMismatch { path: u64, schedule: u64 },
}

/// A realization of `(X_n, T_n)` for `n = 1..=T` together with the initial
/// point `(X_0, T_0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePath {
    initial: (StateId, u64),
    states: Vec<StateId>,
    dwell: Vec<u64>,
}

impl SamplePath {
    /// A change is any slot whose counter is 0. The status may stay the same
    /// across a change when the change kernel allows self-transitions.
    pub fn new(
        initial: (StateId, u64),
        states: Vec<StateId>,
        dwell: Vec<u64>,
    ) -> Result<Self, PathError> {
        if states.len() != dwell.len() {
            return Err(PathError::LengthMismatch {
                states: states.len(),
                dwell: dwell.len(),
            });
        }
        let (mut px, mut pt) = initial;
        for (i, (&x, &t)) in states.iter().zip(&dwell).enumerate() {
            let slot = i + 1;
            if x != px && t != 0 {
                return Err(PathError::MissingReset { slot, dwell: t });
            }
            if t != 0 && t != pt + 1 {
                return Err(PathError::BadIncrement { slot, dwell: t });
            }
            px = x;
            pt = t;
        }
        Ok(Self {
            initial,
            states,
            dwell,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.states.len() as u64
    }

    pub fn initial(&self) -> (StateId, u64) {
        self.initial
    }

    /// `x_n` for `n = 1..=T`.
    pub fn state(&self, n: u64) -> StateId {
        self.states[n as usize - 1]
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn dwell(&self) -> &[u64] {
        &self.dwell
    }

    /// Slots `n in [1, T]` with `t_n = 0`.
    pub fn change_points(&self) -> impl Iterator<Item = u64> + '_ {
        self.dwell
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == 0)
            .map(|(i, _)| i as u64 + 1)
    }
}

/// Sum of the per-slot ages.
pub fn cumulative_aoi(schedule: &UpdateSchedule) -> u64 {
    aoi_series(schedule).total()
}

/// `T^2 / 2 - T / 2 - sum_{i=1}^{K} s_i (d_{i+1} - d_i)`, in integer arithmetic.
pub fn closed_form_aoi(schedule: &UpdateSchedule) -> u64 {
    let t = i128::from(schedule.horizon());
    let k = schedule.len();
    let correction: i128 = (1..=k)
        .map(|i| {
            i128::from(schedule.sample(i))
                * (i128::from(schedule.delivery(i + 1)) - i128::from(schedule.delivery(i)))
        })
        .sum();
    let total = t * (t - 1) / 2 - correction;
    u64::try_from(total).expect("cumulative AoI is non-negative and fits in u64")
}

/// `sum_{i=0}^{K} sum_{j=s_i+1}^{s_{i+1}} (d_{i+1} - j)`: total delay when a
/// change happens in every slot.
pub fn delay_double_sum(schedule: &UpdateSchedule) -> u64 {
    let k = schedule.len();
    (0..=k)
        .map(|i| {
            let next_d = schedule.delivery(i + 1);
            (schedule.sample(i) + 1..=schedule.sample(i + 1))
                .map(|j| next_d - j)
                .sum::<u64>()
        })
        .sum()
}

/// A detected change and its delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub change_point: u64,
    pub delay: u64,
}

/// `min{d_i : s_i >= n, i <= K + 1} - n` for every change point `n`.
pub fn detection_delays(
    path: &SamplePath,
    schedule: &UpdateSchedule,
) -> Result<Vec<Detection>, PathError> {
    if path.horizon() != schedule.horizon() {
        return Err(PathError::HorizonMismatch {
            path: path.horizon(),
            schedule: schedule.horizon(),
        });
    }
    let updates = schedule.updates();
    let mut idx = 0;
    Ok(path
        .change_points()
        .map(|n| {
            while idx < updates.len() && updates[idx].sample < n {
                idx += 1;
            }
            let detected_at = updates.get(idx).map_or(schedule.horizon(), |u| u.delivery);
            Detection {
                change_point: n,
                delay: detected_at - n,
            }
        })
        .collect())
}

/// `P(T_n = 0) * (T^2/2 - T/2 - sum s_i (d_{i+1} - d_i))`.
pub fn expected_cumulative_delay_stationary(schedule: &UpdateSchedule, p_change: f64) -> f64 {
    p_change * closed_form_aoi(schedule) as f64
}

/// Per-slot GAoI `a_n * rate` for `n in [0, T - 1]`.
pub fn gaoi_series_stationary(schedule: &UpdateSchedule, rate: f64) -> Vec<f64> {
    aoi_series(schedule)
        .ages()
        .iter()
        .map(|&a| a as f64 * rate)
        .collect()
}

/// Per-path totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub cum_aoi: u64,
    pub cum_gaoi: f64,
    pub cum_delay: u64,
    pub num_changes: u64,
}

impl RunSummary {
    /// Totals for a stationary model with entropy rate `rate`.
    pub fn stationary(
        path: &SamplePath,
        schedule: &UpdateSchedule,
        rate: f64,
    ) -> Result<Self, PathError> {
        let detections = detection_delays(path, schedule)?;
        let cum_aoi = cumulative_aoi(schedule);
        Ok(Self {
            cum_aoi,
            cum_gaoi: cum_aoi as f64 * rate,
            cum_delay: detections.iter().map(|d| d.delay).sum(),
            num_changes: detections.len() as u64,
        })
    }
}

/// Ensemble means and standard errors fed to [`verify_theorem1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanWithError {
    pub mean: f64,
    pub se: f64,
}

impl MeanWithError {
    pub fn exact(mean: f64) -> Self {
        Self { mean, se: 0.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("entropy rate is zero but cumulative GAoI is {0}")]
    InconsistentZeroRate(f64),
    #[error("change probability must be positive, got {0}")]
    NoChanges(f64),
}

/// Three routes to the expected cumulative AoI:
/// `GAoI / rate`, the AoI itself, and `delay / P(T_n = 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    /// `None` when the entropy rate is zero and the ratio is undefined.
    pub gaoi_over_rate: Option<MeanWithError>,
    pub aoi: MeanWithError,
    pub delay_over_p: MeanWithError,
    /// `|aoi - delay/p| / aoi`.
    pub rel_gap_delay: f64,
    /// `|aoi - gaoi/rate| / aoi`, `None` when not applicable.
    pub rel_gap_gaoi: Option<f64>,
}

impl Theorem1Report {
    pub fn max_rel_gap(&self) -> f64 {
        self.rel_gap_gaoi.unwrap_or(0.0).max(self.rel_gap_delay)
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Scales the ensemble GAoI, AoI and delay onto a common axis and reports
/// how far apart they are. Detection delay follows the change-slot reading
/// of `min{d_i : s_i >= n} - n`.
pub fn verify_theorem1(
    gaoi: MeanWithError,
    aoi: MeanWithError,
    delay: MeanWithError,
    rate: f64,
    p_change: f64,
) -> Result<Theorem1Report, VerifyError> {
    if p_change.is_nan() || p_change <= 0.0 {
        return Err(VerifyError::NoChanges(p_change));
    }
    let gaoi_over_rate = if rate == 0.0 {
        if gaoi.mean != 0.0 {
            return Err(VerifyError::InconsistentZeroRate(gaoi.mean));
        }
        None
    } else {
        Some(MeanWithError {
            mean: gaoi.mean / rate,
            se: gaoi.se / rate,
        })
    };
    let delay_over_p = MeanWithError {
        mean: delay.mean / p_change,
        se: delay.se / p_change,
    };
    Ok(Theorem1Report {
        rel_gap_gaoi: gaoi_over_rate.map(|g| rel_gap(aoi.mean, g.mean)),
        rel_gap_delay: rel_gap(aoi.mean, delay_over_p.mean),
        gaoi_over_rate,
        aoi,
        delay_over_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Update;

    fn sched(t: u64, v: &[(u64, u64)]) -> UpdateSchedule {
        UpdateSchedule::new(t, v.iter().map(|&(s, d)| Update::new(s, d)).collect()).unwrap()
    }

    fn path_with_changes(t: u64, changes: &[u64]) -> SamplePath {
        let mut states = Vec::new();
        let mut dwell = Vec::new();
        let (mut x, mut d) = (0usize, 0u64);
        for n in 1..=t {
            if changes.contains(&n) {
                x ^= 1;
                d = 0;
            } else {
                d += 1;
            }
            states.push(StateId(x));
            dwell.push(d);
        }
        SamplePath::new((StateId(0), 0), states, dwell).unwrap()
    }

    #[test]
    fn aoi_examples() {
        let s = sched(10, &[(3, 5)]);
        assert_eq!(cumulative_aoi(&s), 30);
        assert_eq!(closed_form_aoi(&s), 30);
        assert_eq!(delay_double_sum(&s), 30);
        let empty = UpdateSchedule::empty(17);
        assert_eq!(cumulative_aoi(&empty), 17 * 16 / 2);
        assert_eq!(closed_form_aoi(&empty), 17 * 16 / 2);
        let saw = sched(20, &[(5, 5), (10, 10), (15, 15)]);
        assert_eq!(cumulative_aoi(&saw), 4 * 10);
        assert_eq!(closed_form_aoi(&saw), 40);
    }

    #[test]
    fn wide_horizon_fits() {
        let t = 1_000_000;
        assert_eq!(closed_form_aoi(&UpdateSchedule::empty(t)), t * (t - 1) / 2);
    }

    #[test]
    fn delay_examples() {
        let s = sched(10, &[(3, 5)]);
        let d = detection_delays(&path_with_changes(10, &[2, 4]), &s).unwrap();
        assert_eq!(
            d,
            vec![
                Detection {
                    change_point: 2,
                    delay: 3
                },
                Detection {
                    change_point: 4,
                    delay: 6
                },
            ]
        );
        let instant = sched(10, &[(4, 4)]);
        let d = detection_delays(&path_with_changes(10, &[4]), &instant).unwrap();
        assert_eq!(d[0].delay, 0);
        let d = detection_delays(&path_with_changes(10, &[1, 2, 3]), &s).unwrap();
        assert!(d.iter().all(|det| det.change_point + det.delay == 5));
        assert!(detection_delays(&path_with_changes(9, &[]), &s).is_err());
    }

    #[test]
    fn expected_delay_examples() {
        let s = sched(10, &[(3, 5)]);
        assert_eq!(expected_cumulative_delay_stationary(&s, 1.0), 30.0);
        assert_eq!(expected_cumulative_delay_stationary(&s, 0.0), 0.0);
    }

    #[test]
    fn gaoi_examples() {
        let s = sched(10, &[(3, 5)]);
        assert!(gaoi_series_stationary(&s, 0.0).iter().all(|&g| g == 0.0));
        let h = crate::markov::binary_entropy(0.6);
        let total: f64 = gaoi_series_stationary(&s, h).iter().sum();
        assert!((total - 29.1285).abs() < 1e-4);
    }

    #[test]
    fn path_validation() {
        let bad = SamplePath::new((StateId(0), 0), vec![StateId(1)], vec![1]);
        assert!(matches!(bad, Err(PathError::MissingReset { .. })));
        let bad = SamplePath::new((StateId(0), 0), vec![StateId(0)], vec![3]);
        assert!(matches!(bad, Err(PathError::BadIncrement { .. })));
        // self-transition change keeps the status
        assert!(SamplePath::new((StateId(0), 4), vec![StateId(0)], vec![0]).is_ok());
    }

    #[test]
    fn scaled_quantities_report() {
        let r = verify_theorem1(
            MeanWithError::exact(30.0 * 0.5),
            MeanWithError::exact(30.0),
            MeanWithError::exact(18.0),
            0.5,
            0.6,
        )
        .unwrap();
        assert!(r.max_rel_gap() < 1e-12);

        let r = verify_theorem1(
            MeanWithError::exact(0.0),
            MeanWithError::exact(30.0),
            MeanWithError::exact(30.0),
            0.0,
            1.0,
        )
        .unwrap();
        assert!(r.gaoi_over_rate.is_none() && r.rel_gap_gaoi.is_none());
        assert!(verify_theorem1(
            MeanWithError::exact(1.0),
            MeanWithError::exact(30.0),
            MeanWithError::exact(30.0),
            0.0,
            1.0,
        )
        .is_err());
    }
}
