//! Constant-torque rollouts of the full nonlinear dynamics.

use std::io::Write;

use nalgebra::{DVector, Vector3};
use rayon::prelude::*;

use crate::dynamics::{RobotModel, RobotState};
use crate::error::{Error, Result};
use crate::polytope::Polytope;

/// Torques may exceed the box by this relative amount (LP round-off) and are clamped back.
const TORQUE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    /// Tracked point in task coordinates, zero-padded to three entries.
    pub x: Vector3<f64>,
}

/// Samples after each integration step (the initial state is not included).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV with header `t,q1..qn,qd1..qdn,x,y,z`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.samples.first().map(|s| s.q.len()).unwrap_or(0);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("q{i}")));
        header.extend((1..=n).map(|i| format!("qd{i}")));
        header.extend(["x", "y", "z"].map(String::from));
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![s.t.to_string()];
            row.extend(s.q.iter().map(f64::to_string));
            row.extend(s.qd.iter().map(f64::to_string));
            row.extend(s.x.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of steps for a horizon, `round(t_h / dt)`.
pub fn step_count(t_h: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Validation(format!("time step must be positive, got {dt}")));
    }
    if !(t_h >= dt && t_h.is_finite()) {
        return Err(Error::Validation(format!("horizon {t_h} is shorter than the time step {dt}")));
    }
    Ok((t_h / dt).round() as usize)
}

/// Simulates the end effector under constant torque.
pub fn simulate(model: &RobotModel, state: &RobotState, tau: &DVector<f64>, t_h: f64, dt: f64) -> Result<Trajectory> {
    simulate_point(model, state, tau, t_h, dt, model.last_frame(), &model.end_effector)
}

/// Simulates a point on link `frame` under constant torque.
///
/// Each step applies `q̈ = M⁻¹(τ − τ_d)`, `q ← q + q̇Δt + q̈Δt²/2`, `q̇ ← q̇ + q̈Δt`,
/// then clamps `q̇` to its box and pins any joint that crossed a position limit
/// (velocity zeroed).
pub fn simulate_point(
    model: &RobotModel,
    state: &RobotState,
    tau: &DVector<f64>,
    t_h: f64,
    dt: f64,
    frame: usize,
    local_point: &Vector3<f64>,
) -> Result<Trajectory> {
    let steps = step_count(t_h, dt)?;
    state.check_within(model)?;
    model.check_frame(frame)?;
    if tau.len() != model.dof() {
        return Err(Error::DimensionMismatch {
            what: "tau",
            expected: model.dof(),
            got: tau.len(),
        });
    }
    let mut tau = tau.clone();
    for (i, lim) in model.tau_limits().enumerate() {
        let slack = TORQUE_SLACK * lim.min.abs().max(lim.max.abs()).max(1.0);
        if tau[i] < lim.min - slack || tau[i] > lim.max + slack {
            return Err(Error::Validation(format!(
                "torque {} on joint {} outside [{}, {}]",
                tau[i],
                i + 1,
                lim.min,
                lim.max
            )));
        }
        tau[i] = lim.clamp(tau[i]);
    }

    let mut q = state.q.clone();
    let mut qd = state.qd.clone();
    let mut samples = Vec::with_capacity(steps);
    for k in 1..=steps {
        let qdd = model.forward_dynamics(&q, &qd, &tau)?;
        q += &qd * dt + &qdd * (0.5 * dt * dt);
        qd += qdd * dt;
        for (i, j) in model.joints.iter().enumerate() {
            qd[i] = j.qd_limits.clamp(qd[i]);
            if !j.q_limits.contains(q[i]) {
                q[i] = j.q_limits.clamp(q[i]);
                qd[i] = 0.0;
            }
        }
        let world = model.chain_pose(&q).point(frame, local_point);
        samples.push(Sample {
            t: k as f64 * dt,
            q: q.clone(),
            qd: qd.clone(),
            x: model.task_coords(&world),
        });
    }
    Ok(Trajectory { samples })
}

/// Simulated task-space positions from every vertex torque of a polytope.
#[derive(Debug, Clone)]
pub struct ReachedSet {
    pub points: Vec<Vector3<f64>>,
    /// `points[k * steps .. (k + 1) * steps]` came from vertex `k`.
    pub steps: usize,
    pub n_vertices: usize,
}

impl ReachedSet {
    pub fn from_vertex(&self, k: usize) -> &[Vector3<f64>] {
        &self.points[k * self.steps..(k + 1) * self.steps]
    }
}

/// Rolls out the generator torque of every vertex and pools the end-effector samples.
pub fn collect_reached(model: &RobotModel, state: &RobotState, poly: &Polytope, t_h: f64, dt: f64) -> Result<ReachedSet> {
    let steps = step_count(t_h, dt)?;
    let taus = poly.witnesses().ok_or(Error::MissingWitness)?;
    let rollouts: Vec<Trajectory> = taus
        .par_iter()
        .map(|tau| simulate(model, state, tau, t_h, dt))
        .collect::<Result<_>>()?;
    let points = rollouts.into_iter().flat_map(|t| t.samples.into_iter().map(|s| s.x)).collect();
    Ok(ReachedSet {
        points,
        steps,
        n_vertices: taus.len(),
    })
}
