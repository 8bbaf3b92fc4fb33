//! Simulation-based accuracy checks, the Cartesian box baseline and timing runs.

mod baseline;
mod metrics;
mod report;
mod sampling;
mod simulate;
mod timing;

pub use baseline::{cube_baseline, CubeVariant};
pub use metrics::{contained_hull, evaluate, metric_m1, metric_m2, metric_m3, Metrics};
pub use report::{
    evaluate_state, run_benchmark, summarize, write_report_csv, write_summary_csv, BenchmarkConfig, BenchmarkRun,
    HorizonSummary, MetricsReport, REPORT_COLUMNS,
};
pub use sampling::random_configurations;
pub use simulate::{collect_reached, simulate, simulate_point, step_count, ReachedSet, Sample, Trajectory};
pub use timing::{random_environment, timing_run, write_timing_csv, TimingCell};
