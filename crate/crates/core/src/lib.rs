//! Information freshness under Markovian status evolution.
//!
//! A monitored system moves through a finite set of statuses. A sensor
//! samples it and delivers time-stamped updates to a monitor. This crate
//! measures how stale the monitor's view is in three ways and relates them:
//!
//! * the age of information (AoI), `n - delta(n)` where `delta(n)` is the
//!   sampling time of the freshest delivered update;
//! * the generalized age (GAoI), the conditional entropy of the status
//!   trajectory since `delta(n)` given the sampled status;
//! * the detection delay of each status change.
//!
//! For a stationary joint chain the GAoI equals the age times the entropy
//! rate, and the expected total detection delay equals the total AoI times
//! the per-slot change probability. For a single change point with a
//! geometric prior the cumulative GAoI is an affine function of the expected
//! detection delay.
//!
//! Modules:
//! * [`markov`]: the joint `(status, dwell)` chain, its stationary law and
//!   entropy rate;
//! * [`bayes`]: the single change point model;
//! * [`schedule`]: update schedules, policies and the age process;
//! * [`metrics`]: cumulative AoI, GAoI and detection delay;
//! * [`oracle`]: brute-force enumerations used to check the closed forms;
//! * [`ensemble`]: deterministic parallel Monte Carlo.

pub mod bayes;
pub mod ensemble;
pub mod markov;
pub mod metrics;
pub mod oracle;
pub mod schedule;

pub use bayes::{BayesError, BayesModel};
pub use ensemble::{
    derive_stream, run_ensemble, run_ensemble_with_threads, EnsembleConfig, EnsembleError,
    EnsembleStats, MetricStats, ModelSpec, SlotAverages, Stream,
};
pub use markov::{
    ChangeKernel, DwellKernel, DwellLaw, EntropyRate, JointModel, JointState, ModelError,
    StateId, StationaryDistribution,
};
pub use metrics::{RunSummary, SamplePath};
pub use schedule::{DelayLaw, PolicySpec, ScheduleError, Update, UpdateSchedule};
