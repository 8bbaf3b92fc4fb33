//! Wall-time of the polytope computation against horizon and environment size.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitCircle, UnitSphere};
use serde::Serialize;

use super::sampling::random_configurations;
use crate::dynamics::RobotModel;
use crate::error::{Error, Result};
use crate::horizon::{add_environment, build_projection, EnvironmentConstraints, HorizonSpec, ProjectionProblem};
use crate::polytope::ichm;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingCell {
    pub t_h: f64,
    pub env_rows: usize,
    /// Configurations timed (infeasible ones are excluded).
    pub samples: usize,
    pub infeasible: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub mean_vertices: f64,
}

/// Half-spaces with uniformly random normals that never exclude `x*`.
///
/// Each offset is `n·x* + margin` with the margin a uniform fraction in
/// [0.2, 1.0] of the torque-box support `Σ_j |(Pᵀn)_j| (τ_max − τ_min)_j / 2`.
/// That support ignores the velocity and position rows, so when those bind
/// only a small share of the rows touch the reachable set.
pub fn random_environment(
    problem: &ProjectionProblem,
    model: &RobotModel,
    rows: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EnvironmentConstraints> {
    let m = problem.task_dim();
    let half_range = DVector::from_iterator(model.dof(), model.tau_limits().map(|l| 0.5 * l.width()));
    let mut a = DMatrix::zeros(rows, m);
    let mut b = DVector::zeros(rows);
    for r in 0..rows {
        let n: Vec<f64> = if m == 3 {
            let v: [f64; 3] = UnitSphere.sample(rng);
            v.to_vec()
        } else {
            let v: [f64; 2] = UnitCircle.sample(rng);
            v.to_vec()
        };
        let n = DVector::from_vec(n);
        let support = problem.p().tr_mul(&n).abs().dot(&half_range);
        let margin = support * rng.random_range(0.2..=1.0);
        a.row_mut(r).copy_from(&n.transpose());
        b[r] = n.dot(problem.x_star()) + margin;
    }
    EnvironmentConstraints::new(a, b)
}

/// Times `build_projection` + environment + ICHM for every (horizon, row count) cell.
///
/// Runs sequentially so that timings are not disturbed by other work.
pub fn timing_run(
    model: &RobotModel,
    horizons: &[f64],
    configs: usize,
    env_row_counts: &[usize],
    seed: u64,
    delta: f64,
) -> Result<Vec<TimingCell>> {
    if horizons.is_empty() || env_row_counts.is_empty() || configs == 0 {
        return Err(Error::Validation("timing run needs horizons, row counts and configurations".into()));
    }
    let states = random_configurations(model, configs, seed, false);
    let mut cells = Vec::new();
    for &t_h in horizons {
        let horizon = HorizonSpec::new(t_h)?;
        for &rows in env_row_counts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (rows as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut times = Vec::with_capacity(configs);
            let mut vertices = 0usize;
            let mut infeasible = 0;
            for state in &states {
                let frame = model.last_frame();
                // The environment is drawn outside the timed region; the rows depend on x* and P only.
                let base = build_projection(model, state, &horizon, frame, &model.end_effector)?;
                let env = random_environment(&base, model, rows, &mut rng)?;

                let start = Instant::now();
                let problem = build_projection(model, state, &horizon, frame, &model.end_effector)?;
                let problem = add_environment(&problem, &env)?;
                let poly = ichm(&problem, delta)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                if poly.is_empty() {
                    infeasible += 1;
                    continue;
                }
                vertices += poly.vertices().len();
                times.push(ms);
            }
            let n = times.len().max(1) as f64;
            let mean = times.iter().sum::<f64>() / n;
            let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            cells.push(TimingCell {
                t_h,
                env_rows: rows,
                samples: times.len(),
                infeasible,
                mean_ms: mean,
                std_ms: var.sqrt(),
                mean_vertices: vertices as f64 / n,
            });
        }
    }
    Ok(cells)
}

pub fn write_timing_csv<W: Write>(cells: &[TimingCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_h", "env_rows", "samples", "infeasible", "mean_ms", "std_ms", "mean_vertices"])?;
    for c in cells {
        w.write_record([
            c.t_h.to_string(),
            c.env_rows.to_string(),
            c.samples.to_string(),
            c.infeasible.to_string(),
            format!("{:.3}", c.mean_ms),
            format!("{:.3}", c.std_ms),
            format!("{:.1}", c.mean_vertices),
        ])?;
    }
    w.flush()?;
    Ok(())
}
