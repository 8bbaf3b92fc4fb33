//! Recursive Newton-Euler inverse dynamics and composite-rigid-body mass matrix.
//!
//! Both passes work directly in world coordinates: each link carries its
//! angular velocity/acceleration and the linear acceleration of its joint
//! origin. Gravity enters as an upward acceleration of the fixed base.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::kinematics::ChainPose;
use super::model::{check_len, parallel_axis, RobotModel};
use crate::error::{Error, Result};

/// Per-link motion produced by the forward sweep.
struct LinkMotion {
    omega: Vec<Vector3<f64>>,
    alpha: Vec<Vector3<f64>>,
    /// Linear acceleration of each joint origin.
    accel: Vec<Vector3<f64>>,
}

fn forward_sweep(
    pose: &ChainPose,
    qd: &DVector<f64>,
    qdd: &DVector<f64>,
    base_accel: Vector3<f64>,
) -> LinkMotion {
    let n = pose.frames.len();
    let mut omega = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    let mut accel = Vec::with_capacity(n);

    let (mut w_prev, mut dw_prev, mut a_prev) = (Vector3::zeros(), Vector3::zeros(), base_accel);
    let mut o_prev = pose.origin(0);
    for i in 0..n {
        let z = pose.axes[i];
        let o = pose.origin(i);
        let r = o - o_prev;
        let a = a_prev + dw_prev.cross(&r) + w_prev.cross(&w_prev.cross(&r));
        let w = w_prev + z * qd[i];
        let dw = dw_prev + z * qdd[i] + w_prev.cross(&(z * qd[i]));
        omega.push(w);
        alpha.push(dw);
        accel.push(a);
        (w_prev, dw_prev, a_prev, o_prev) = (w, dw, a, o);
    }
    LinkMotion { omega, alpha, accel }
}

fn world_inertia(pose: &ChainPose, model: &RobotModel, i: usize) -> Matrix3<f64> {
    let r = pose.rotation(i);
    r.matrix() * model.joints[i].link_inertia * r.matrix().transpose()
}

impl RobotModel {
    fn rnea(
        &self,
        pose: &ChainPose,
        qd: &DVector<f64>,
        qdd: &DVector<f64>,
        with_gravity: bool,
    ) -> DVector<f64> {
        let n = self.dof();
        let base = if with_gravity {
            -self.gravity
        } else {
            Vector3::zeros()
        };
        let motion = forward_sweep(pose, qd, qdd, base);

        let mut tau = DVector::zeros(n);
        let mut f_next = Vector3::zeros();
        let mut n_next = Vector3::zeros();
        let mut o_next = Vector3::zeros();
        for i in (0..n).rev() {
            let link = &self.joints[i];
            let o = pose.origin(i);
            let rc = pose.com(self, i) - o;
            let w = motion.omega[i];
            let dw = motion.alpha[i];
            let a_com = motion.accel[i] + dw.cross(&rc) + w.cross(&w.cross(&rc));
            let inertia = world_inertia(pose, self, i);

            let force = a_com * link.link_mass;
            let moment = inertia * dw + w.cross(&(inertia * w));

            let f = force + f_next;
            let mut m = moment + rc.cross(&force) + n_next;
            if i + 1 < n {
                m += (o_next - o).cross(&f_next);
            }
            tau[i] = pose.axes[i].dot(&m);
            (f_next, n_next, o_next) = (f, m, o);
        }
        tau
    }

    /// Joint torques realizing `qdd` from state `(q, qd)`, gravity included.
    pub fn inverse_dynamics(
        &self,
        q: &DVector<f64>,
        qd: &DVector<f64>,
        qdd: &DVector<f64>,
    ) -> DVector<f64> {
        let pose = self.chain_pose(q);
        self.rnea(&pose, qd, qdd, true)
    }

    /// Coriolis, centrifugal and gravity torque `C(q, qd) qd + tau_g(q)`.
    pub fn bias_torque(&self, q: &DVector<f64>, qd: &DVector<f64>) -> DVector<f64> {
        let pose = self.chain_pose(q);
        self.rnea(&pose, qd, &DVector::zeros(self.dof()), true)
    }

    /// Bias acceleration `J̇ q̇` of a point on link `frame`.
    pub fn jdot_qdot(
        &self,
        q: &DVector<f64>,
        qd: &DVector<f64>,
        frame: usize,
        local_point: &Vector3<f64>,
    ) -> Result<Vector3<f64>> {
        self.check_frame(frame)?;
        check_len("q", self.dof(), q.len())?;
        check_len("qd", self.dof(), qd.len())?;
        let pose = self.chain_pose(q);
        let motion = forward_sweep(&pose, qd, &DVector::zeros(self.dof()), Vector3::zeros());
        let r = pose.point(frame, local_point) - pose.origin(frame);
        let w = motion.omega[frame];
        Ok(motion.accel[frame] + motion.alpha[frame].cross(&r) + w.cross(&w.cross(&r)))
    }

    /// Joint-space mass matrix by composite-rigid-body accumulation.
    pub fn mass_matrix(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dof();
        let pose = self.chain_pose(q);

        // Composite body of links j..n: mass, COM, inertia about that COM.
        let mut comp_mass = vec![0.0; n];
        let mut comp_com = vec![Vector3::zeros(); n];
        let mut comp_inertia = vec![Matrix3::zeros(); n];
        let (mut m_acc, mut c_acc, mut i_acc) = (0.0, Vector3::zeros(), Matrix3::zeros());
        for j in (0..n).rev() {
            let mj = self.joints[j].link_mass;
            let cj = pose.com(self, j);
            let ij = world_inertia(&pose, self, j);
            let m_new = m_acc + mj;
            let c_new = if m_new > 0.0 {
                (c_acc * m_acc + cj * mj) / m_new
            } else {
                cj
            };
            i_acc = i_acc + parallel_axis(m_acc, &(c_acc - c_new)) + ij + parallel_axis(mj, &(cj - c_new));
            m_acc = m_new;
            c_acc = c_new;
            comp_mass[j] = m_acc;
            comp_com[j] = c_acc;
            comp_inertia[j] = i_acc;
        }

        let mut mm = DMatrix::zeros(n, n);
        for j in 0..n {
            let z = pose.axes[j];
            let lever = comp_com[j] - pose.origin(j);
            // Wrench needed to give the composite body a unit rate about joint j.
            let force = z.cross(&lever) * comp_mass[j];
            let moment_com = comp_inertia[j] * z;
            for i in 0..=j {
                let moment = moment_com + (comp_com[j] - pose.origin(i)).cross(&force);
                let v = pose.axes[i].dot(&moment);
                mm[(i, j)] = v;
                mm[(j, i)] = v;
            }
        }
        mm
    }

    /// Joint accelerations `M⁻¹ (tau − tau_d)`.
    pub fn forward_dynamics(
        &self,
        q: &DVector<f64>,
        qd: &DVector<f64>,
        tau: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let n = self.dof();
        check_len("q", n, q.len())?;
        check_len("qd", n, qd.len())?;
        check_len("tau", n, tau.len())?;
        let chol = self
            .mass_matrix(q)
            .cholesky()
            .ok_or(Error::MassMatrixFactorization)?;
        Ok(chol.solve(&(tau - self.bias_torque(q, qd))))
    }

    /// Kinetic energy `½ qdᵀ M qd`.
    pub fn kinetic_energy(&self, q: &DVector<f64>, qd: &DVector<f64>) -> f64 {
        0.5 * qd.dot(&(self.mass_matrix(q) * qd))
    }
}
