//! Monte-Carlo simulation of platform trials with staggered arms and a
//! shared control group.
//!
//! Time is measured in recruited control patients. Arm `i` (0-based) opens at
//! `i·n_Δ`, has its interim look after `n1` of its own patients and its final
//! look after `n`. Each arm and the control group draw from their own seeded
//! stream, so a replication is reproducible in isolation.

mod config;
mod metrics;
mod report;
mod run;
mod scenario;
mod streams;

pub use config::{parse_grid, KEYS};
pub use metrics::{MetricsAccumulator, MetricsSummary, Moments, ReplicationMetrics};
pub use report::{csv_row, write_csv, CSV_HEADER};
pub use run::{
    control_window, run_grid, run_replication, run_scenario, ArmRecord, ArmTimeline, Prepared, ReplicationRecord,
    ScenarioResult, CHUNK,
};
pub use scenario::{AlternativeOrder, BetaKind, BudgetConfig, BudgetScenario, ControlMode, TrialScenario};
pub use streams::{assign_truth, fnv1a, normal_sample, stream_rng, ControlStream, StreamId};
