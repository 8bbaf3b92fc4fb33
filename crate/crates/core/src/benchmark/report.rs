//! Per-configuration accuracy runs and their CSV report.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baseline::{cube_baseline, CubeVariant};
use super::metrics::evaluate;
use super::sampling::random_configurations;
use super::simulate::collect_reached;
use crate::dynamics::{RobotModel, RobotState};
use crate::error::{Error, Result};
use crate::horizon::{build_projection, HorizonSpec};
use crate::polytope::ichm;

pub const REPORT_COLUMNS: [&str; 12] = [
    "config_id", "seed", "t_h", "n_vertices", "m1", "m2", "m3", "vol_Px", "vol_R1", "vol_R2", "vol_Cx", "poly_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub horizons: Vec<f64>,
    pub configs: usize,
    pub seed: u64,
    pub dt: f64,
    pub delta: f64,
    /// Containment tolerance for m1; defaults to `delta`.
    pub m1_eps: Option<f64>,
    pub cube_variant: CubeVariant,
    /// Sample joint velocities as well as positions.
    pub sample_velocity: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            horizons: vec![0.05, 0.15, 0.25],
            configs: 20,
            seed: 0,
            dt: 0.005,
            delta: 1e-3,
            m1_eps: None,
            cube_variant: CubeVariant::Literal,
            sample_velocity: false,
        }
    }
}

/// One row of the accuracy report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub config_id: usize,
    pub seed: u64,
    pub t_h: f64,
    pub n_vertices: usize,
    /// `None` when the horizon problem was infeasible.
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub vol_px: f64,
    pub vol_r1: f64,
    pub vol_r2: f64,
    /// `None` without Cartesian limits or when the box is empty at this horizon.
    pub vol_cx: Option<f64>,
    /// Wall time of the polytope computation in milliseconds.
    pub poly_ms: f64,
}

/// Accuracy metrics for one state and horizon.
pub fn evaluate_state(
    model: &RobotModel,
    state: &RobotState,
    t_h: f64,
    cfg: &BenchmarkConfig,
    config_id: usize,
) -> Result<MetricsReport> {
    let horizon = HorizonSpec::new(t_h)?;
    let start = Instant::now();
    let problem = build_projection(model, state, &horizon, model.last_frame(), &model.end_effector)?;
    let poly = ichm(&problem, cfg.delta)?;
    let poly_ms = start.elapsed().as_secs_f64() * 1e3;

    let lin = problem.linearization().expect("built from a model");
    let vol_cx = match &model.cartesian_limits {
        Some(limits) => match cube_baseline(&lin.x_k, &lin.xd_k, limits, t_h, cfg.cube_variant) {
            Ok(c) => Some(c.volume()),
            Err(Error::EmptyInterval { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };

    let mut row = MetricsReport {
        config_id,
        seed: cfg.seed,
        t_h,
        n_vertices: poly.vertices().len(),
        m1: None,
        m2: None,
        m3: None,
        vol_px: poly.volume(),
        vol_r1: 0.0,
        vol_r2: 0.0,
        vol_cx,
        poly_ms,
    };
    if poly.is_empty() {
        return Ok(row);
    }
    let reached = collect_reached(model, state, &poly, t_h, cfg.dt)?;
    let m = evaluate(&reached.points, &poly, cfg.m1_eps.unwrap_or(cfg.delta))?;
    row.m1 = Some(m.m1);
    row.m2 = m.m2;
    row.m3 = m.m3;
    row.vol_r1 = m.vol_r1;
    row.vol_r2 = m.vol_r2;
    Ok(row)
}

/// Rows of a benchmark run plus the (configuration, horizon) pairs that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub rows: Vec<MetricsReport>,
    /// `(config_id, t_h, message)` for every pair that returned an error.
    pub failures: Vec<(usize, f64, String)>,
}

/// Runs every (configuration, horizon) pair; rows are ordered by configuration, then horizon.
///
/// A pair that fails is logged and left out of the rows.
pub fn run_benchmark(model: &RobotModel, cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    if cfg.horizons.is_empty() || cfg.configs == 0 {
        return Err(Error::Validation("benchmark needs at least one horizon and one configuration".into()));
    }
    if !(cfg.dt > 0.0 && cfg.delta > 0.0) {
        return Err(Error::Validation(format!("dt and delta must be positive, got {} and {}", cfg.dt, cfg.delta)));
    }
    let states = random_configurations(model, cfg.configs, cfg.seed, cfg.sample_velocity);
    let jobs: Vec<(usize, &RobotState, f64)> = states
        .iter()
        .enumerate()
        .flat_map(|(i, s)| cfg.horizons.iter().map(move |&t| (i, s, t)))
        .collect();
    let results: Vec<Result<MetricsReport>> =
        jobs.par_iter().map(|&(i, s, t)| evaluate_state(model, s, t, cfg, i)).collect();
    let mut run = BenchmarkRun {
        rows: Vec::with_capacity(results.len()),
        failures: Vec::new(),
    };
    for (res, &(i, _, t)) in results.into_iter().zip(&jobs) {
        match res {
            Ok(row) => run.rows.push(row),
            Err(e) => {
                log::warn!("config {i} at t_h = {t}: {e}");
                run.failures.push((i, t, e.to_string()));
            }
        }
    }
    Ok(run)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Writes the report. With `deterministic`, wall-clock columns are written as `NA`
/// so that identical seeds give byte-identical files.
pub fn write_report_csv<W: Write>(rows: &[MetricsReport], out: W, deterministic: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.config_id.to_string(),
            r.seed.to_string(),
            r.t_h.to_string(),
            r.n_vertices.to_string(),
            opt(r.m1),
            opt(r.m2),
            opt(r.m3),
            r.vol_px.to_string(),
            r.vol_r1.to_string(),
            r.vol_r2.to_string(),
            opt(r.vol_cx),
            if deterministic { "NA".to_string() } else { format!("{:.3}", r.poly_ms) },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-horizon statistics over the rows, skipping missing values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonSummary {
    pub t_h: f64,
    pub rows: usize,
    pub infeasible: usize,
    pub mean_m1: Option<f64>,
    pub std_m1: Option<f64>,
    pub mean_m2: Option<f64>,
    pub std_m2: Option<f64>,
    pub mean_m3: Option<f64>,
    pub std_m3: Option<f64>,
    pub mean_vol_px: f64,
    pub mean_vol_cx: Option<f64>,
    pub mean_poly_ms: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Sample standard deviation; `None` with fewer than two values.
fn std_dev(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Some(var.sqrt())
}

pub fn summarize(rows: &[MetricsReport]) -> Vec<HorizonSummary> {
    let mut horizons: Vec<f64> = rows.iter().map(|r| r.t_h).collect();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    horizons
        .into_iter()
        .map(|t| {
            let sel: Vec<&MetricsReport> = rows.iter().filter(|r| r.t_h == t).collect();
            let column = |f: fn(&MetricsReport) -> Option<f64>| -> Vec<f64> { sel.iter().filter_map(|r| f(r)).collect() };
            let (m1, m2, m3) = (column(|r| r.m1), column(|r| r.m2), column(|r| r.m3));
            HorizonSummary {
                t_h: t,
                rows: sel.len(),
                infeasible: sel.iter().filter(|r| r.m1.is_none()).count(),
                mean_m1: mean(m1.iter().copied()),
                std_m1: std_dev(&m1),
                mean_m2: mean(m2.iter().copied()),
                std_m2: std_dev(&m2),
                mean_m3: mean(m3.iter().copied()),
                std_m3: std_dev(&m3),
                mean_vol_px: mean(sel.iter().map(|r| r.vol_px)).unwrap_or(0.0),
                mean_vol_cx: mean(sel.iter().filter_map(|r| r.vol_cx)),
                mean_poly_ms: mean(sel.iter().map(|r| r.poly_ms)).unwrap_or(0.0),
            }
        })
        .collect()
}

/// Writes the per-horizon summary; missing values are `NA`.
pub fn write_summary_csv<W: Write>(summary: &[HorizonSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "t_h", "rows", "infeasible", "mean_m1", "std_m1", "mean_m2", "std_m2", "mean_m3", "std_m3", "mean_vol_Px",
        "mean_vol_Cx",
    ])?;
    for s in summary {
        w.write_record([
            s.t_h.to_string(),
            s.rows.to_string(),
            s.infeasible.to_string(),
            opt(s.mean_m1),
            opt(s.std_m1),
            opt(s.mean_m2),
            opt(s.std_m2),
            opt(s.mean_m3),
            opt(s.std_m3),
            s.mean_vol_px.to_string(),
            opt(s.mean_vol_cx),
        ])?;
    }
    w.flush()?;
    Ok(())
}
