//! Fixtures shared by the criterion benches.

use gaoi_core::markov::{validate_model, ChangeKernel, DwellKernel, DwellLaw};
use gaoi_core::schedule::random_schedule;
use gaoi_core::{derive_stream, JointModel, UpdateSchedule};

pub fn swap_model(q: f64) -> JointModel {
    validate_model(
        ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
        DwellKernel::homogeneous(DwellLaw::geometric(q), 2),
    )
    .expect("valid model")
}

/// Four statuses with distinct dwell laws and a slowly decaying tail, so
/// the stationary law needs a few hundred levels per status.
pub fn heterogeneous_model() -> JointModel {
    let rows = vec![
        vec![0.1, 0.4, 0.3, 0.2],
        vec![0.25, 0.0, 0.5, 0.25],
        vec![0.5, 0.2, 0.0, 0.3],
        vec![0.3, 0.3, 0.4, 0.0],
    ];
    let laws = (0..4)
        .map(|x| {
            let prefix = (0..10).map(|i| ((x + i) % 7) as f64 / 8.0).collect();
            DwellLaw::new(prefix, 0.05 + 0.02 * x as f64)
        })
        .collect();
    validate_model(ChangeKernel::new(rows), DwellKernel::new(laws)).expect("valid model")
}

pub fn schedules(horizon: u64, count: u64) -> Vec<UpdateSchedule> {
    (0..count)
        .map(|k| random_schedule(horizon, &mut derive_stream(99, k, 0)))
        .collect()
}
