//! Linearized horizon prediction and its torque-space constraint polytope.
//!
//! With a constant torque τ held for `t_h` seconds and the model frozen at the
//! current state, the task-space position at the end of the horizon is
//! affine in τ: `x = Pτ + x*`. Joint torque, velocity and position limits at
//! the end of the horizon become linear rows `Aτ ≤ b`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::dynamics::{RobotModel, RobotState};
use crate::error::{Error, Result};
use crate::polytope::{ichm, LinearProgram, Polytope};

/// Prediction horizon length in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSpec {
    t_h: f64,
}

impl HorizonSpec {
    pub fn new(t_h: f64) -> Result<Self> {
        if t_h > 0.0 && t_h.is_finite() {
            Ok(HorizonSpec { t_h })
        } else {
            Err(Error::Validation(format!("horizon must be positive and finite, got {t_h}")))
        }
    }

    pub fn t_h(&self) -> f64 {
        self.t_h
    }
}

/// Quantities the problem was built from, kept for diagnostics and checks.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    /// Bias torque: the torque giving zero joint acceleration.
    pub tau_d: DVector<f64>,
    pub m_inv: DMatrix<f64>,
    /// Task rows of the positional Jacobian.
    pub jacobian: DMatrix<f64>,
    pub x_k: DVector<f64>,
    pub xd_k: DVector<f64>,
    pub t_h: f64,
}

impl Linearization {
    /// Joint position and velocity at the end of the horizon under constant torque.
    pub fn joint_prediction(&self, tau: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let qdd = &self.m_inv * (tau - &self.tau_d);
        let qd = &self.qd + &qdd * self.t_h;
        let q = &self.q + &self.qd * self.t_h + qdd * (0.5 * self.t_h * self.t_h);
        (q, qd)
    }
}

/// The family `{x = Pτ + x* : Aτ ≤ b}`.
#[derive(Debug, Clone)]
pub struct ProjectionProblem {
    p: DMatrix<f64>,
    x_star: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    n_limit_rows: usize,
    linearization: Option<Linearization>,
}

fn all_finite<'a>(it: impl IntoIterator<Item = &'a f64>) -> bool {
    it.into_iter().all(|v| v.is_finite())
}

impl ProjectionProblem {
    /// Builds a problem directly; every row counts as a limit row.
    pub fn from_parts(p: DMatrix<f64>, x_star: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let m = p.nrows();
        if !(m == 2 || m == 3) {
            return Err(Error::DimensionMismatch {
                what: "task dimension",
                expected: 3,
                got: m,
            });
        }
        let checks = [
            ("x_star", m, x_star.len()),
            ("constraint columns", p.ncols(), a.ncols()),
            ("constraint rows", a.nrows(), b.len()),
        ];
        for (what, expected, got) in checks {
            if expected != got {
                return Err(Error::DimensionMismatch { what, expected, got });
            }
        }
        if !(all_finite(p.iter()) && all_finite(x_star.iter()) && all_finite(a.iter()) && all_finite(b.iter())) {
            return Err(Error::Validation("projection problem has non-finite entries".into()));
        }
        let n_limit_rows = a.nrows();
        Ok(ProjectionProblem {
            p,
            x_star,
            a,
            b,
            n_limit_rows,
            linearization: None,
        })
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn x_star(&self) -> &DVector<f64> {
        &self.x_star
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn task_dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_vars(&self) -> usize {
        self.p.ncols()
    }

    /// Rows coming from joint limits (the rest are environment rows).
    pub fn n_limit_rows(&self) -> usize {
        self.n_limit_rows
    }

    pub fn n_env_rows(&self) -> usize {
        self.a.nrows() - self.n_limit_rows
    }

    pub fn linearization(&self) -> Option<&Linearization> {
        self.linearization.as_ref()
    }

    /// Predicted task-space position for a constant torque.
    pub fn predict(&self, tau: &DVector<f64>) -> DVector<f64> {
        &self.p * tau + &self.x_star
    }

    /// `x*` as a 3-vector (zero-padded for planar problems).
    pub fn x_star3(&self) -> Vector3<f64> {
        let mut v = Vector3::zeros();
        v.as_mut_slice()[..self.task_dim()].copy_from_slice(self.x_star.as_slice());
        v
    }

    /// Reachable-space polytope with face tolerance `delta`.
    pub fn reachable(&self, delta: f64) -> Result<Polytope> {
        ichm(self, delta)
    }
}

/// Half-spaces `A_e x ≤ b_e` in task space.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConstraints {
    a_e: DMatrix<f64>,
    b_e: DVector<f64>,
}

impl EnvironmentConstraints {
    pub fn new(a_e: DMatrix<f64>, b_e: DVector<f64>) -> Result<Self> {
        if a_e.nrows() != b_e.len() {
            return Err(Error::DimensionMismatch {
                what: "environment rows",
                expected: a_e.nrows(),
                got: b_e.len(),
            });
        }
        if !(all_finite(a_e.iter()) && all_finite(b_e.iter())) {
            return Err(Error::Validation("environment constraints must be finite".into()));
        }
        Ok(EnvironmentConstraints { a_e, b_e })
    }

    pub fn none(m: usize) -> Self {
        EnvironmentConstraints {
            a_e: DMatrix::zeros(0, m),
            b_e: DVector::zeros(0),
        }
    }

    /// From `(normal, offset)` rows.
    pub fn from_rows(m: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut a = DMatrix::zeros(rows.len(), m);
        let mut b = DVector::zeros(rows.len());
        for (r, (n, d)) in rows.iter().enumerate() {
            if n.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "environment normal",
                    expected: m,
                    got: n.len(),
                });
            }
            a.row_mut(r).copy_from(&DMatrix::from_row_slice(1, m, n));
            b[r] = *d;
        }
        Self::new(a, b)
    }

    pub fn a_e(&self) -> &DMatrix<f64> {
        &self.a_e
    }

    pub fn b_e(&self) -> &DVector<f64> {
        &self.b_e
    }

    pub fn rows(&self) -> usize {
        self.a_e.nrows()
    }

    pub fn dim(&self) -> usize {
        self.a_e.ncols()
    }
}

/// Assembles `P`, `x*` and the joint-limit rows for a point on link `frame`.
///
/// Task coordinates are the model's `task_axes` of the world position.
pub fn build_projection(
    model: &RobotModel,
    state: &RobotState,
    horizon: &HorizonSpec,
    frame: usize,
    local_point: &Vector3<f64>,
) -> Result<ProjectionProblem> {
    state.check_within(model)?;
    model.check_frame(frame)?;
    let n = model.dof();
    let t = horizon.t_h();
    let (q, qd) = (&state.q, &state.qd);

    let m_inv = model
        .mass_matrix(q)
        .cholesky()
        .ok_or(Error::MassMatrixFactorization)?
        .inverse();
    let tau_d = model.bias_torque(q, qd);
    let jac_full = model.jacobian(q, frame, local_point)?;
    let x_full = model.forward_kinematics(q, frame, local_point)?;
    let jdqd_full = model.jdot_qdot(q, qd, frame, local_point)?;

    let axes = &model.task_axes;
    let m = axes.len();
    let jacobian = DMatrix::from_fn(m, n, |r, c| jac_full[(axes[r], c)]);
    let x_k = DVector::from_iterator(m, axes.iter().map(|&a| x_full[a]));
    let jdqd = DVector::from_iterator(m, axes.iter().map(|&a| jdqd_full[a]));
    let xd_k = &jacobian * qd;

    let half_t2 = 0.5 * t * t;
    let p = &jacobian * &m_inv * half_t2;
    let x_star = &x_k + &xd_k * t + jdqd * half_t2 - &p * &tau_d;

    let vel_map = &m_inv * t;
    let pos_map = &m_inv * half_t2;
    let vel_bias = &vel_map * &tau_d;
    let pos_bias = &pos_map * &tau_d;

    let rows = 6 * n;
    let mut a = DMatrix::zeros(rows, n);
    let mut b = DVector::zeros(rows);
    for (i, j) in model.joints.iter().enumerate() {
        a[(2 * i, i)] = 1.0;
        b[2 * i] = j.tau_limits.max;
        a[(2 * i + 1, i)] = -1.0;
        b[2 * i + 1] = -j.tau_limits.min;

        let r = 2 * n + 2 * i;
        a.row_mut(r).copy_from(&vel_map.row(i));
        b[r] = j.qd_limits.max - qd[i] + vel_bias[i];
        a.row_mut(r + 1).copy_from(&(-vel_map.row(i)));
        b[r + 1] = -(j.qd_limits.min - qd[i] + vel_bias[i]);

        let r = 4 * n + 2 * i;
        let drift = q[i] + qd[i] * t;
        a.row_mut(r).copy_from(&pos_map.row(i));
        b[r] = j.q_limits.max - drift + pos_bias[i];
        a.row_mut(r + 1).copy_from(&(-pos_map.row(i)));
        b[r + 1] = -(j.q_limits.min - drift + pos_bias[i]);
    }

    Ok(ProjectionProblem {
        p,
        x_star,
        a,
        b,
        n_limit_rows: rows,
        linearization: Some(Linearization {
            q: q.clone(),
            qd: qd.clone(),
            tau_d,
            m_inv,
            jacobian,
            x_k,
            xd_k,
            t_h: t,
        }),
    })
}

/// Appends `A_e P τ ≤ b_e − A_e x*`. The input problem is left untouched.
pub fn add_environment(problem: &ProjectionProblem, env: &EnvironmentConstraints) -> Result<ProjectionProblem> {
    if env.dim() != problem.task_dim() {
        return Err(Error::DimensionMismatch {
            what: "environment columns",
            expected: problem.task_dim(),
            got: env.dim(),
        });
    }
    let k = problem.a.nrows();
    let e = env.rows();
    let mut a = problem.a.clone().resize_vertically(k + e, 0.0);
    let mut b = problem.b.clone().resize_vertically(k + e, 0.0);
    a.rows_mut(k, e).copy_from(&(&env.a_e * &problem.p));
    b.rows_mut(k, e).copy_from(&(&env.b_e - &env.a_e * &problem.x_star));
    Ok(ProjectionProblem {
        a,
        b,
        ..problem.clone()
    })
}

/// Outcome of a feasibility check.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A torque satisfying every row.
    Feasible(DVector<f64>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Finds a torque satisfying `Aτ ≤ b`, preferring the bias torque when it qualifies.
pub fn check_feasibility(problem: &ProjectionProblem) -> Feasibility {
    let lp = LinearProgram::new(&problem.a, &problem.b);
    if let Some(lin) = &problem.linearization {
        if lp.max_violation(&lin.tau_d) <= 1e-9 {
            return Feasibility::Feasible(lin.tau_d.clone());
        }
    }
    match lp.feasible_point() {
        Some(tau) => Feasibility::Feasible(tau),
        None => Feasibility::Infeasible,
    }
}
