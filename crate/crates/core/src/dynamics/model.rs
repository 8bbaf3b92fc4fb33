//! Robot description types and their JSON file format.

use nalgebra::{DVector, Isometry3, Matrix3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[min, max]` with `min < max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub min: f64,
    pub max: f64,
}

impl Limits {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min < self.max
    }
}

/// One revolute joint together with the link it drives.
#[derive(Debug, Clone)]
pub struct JointSpec {
    /// Transform from the parent joint frame to this joint's zero-angle frame.
    pub origin: Isometry3<f64>,
    /// Rotation axis in this joint's frame.
    pub axis: Vector3<f64>,
    pub link_mass: f64,
    /// Link center of mass in this joint's frame.
    pub link_com: Vector3<f64>,
    /// Link inertia about its center of mass, in this joint's frame.
    pub link_inertia: Matrix3<f64>,
    pub tau_limits: Limits,
    pub qd_limits: Limits,
    pub q_limits: Limits,
}

/// Constant Cartesian limits used by the axis-aligned box baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianLimits {
    /// Acceleration interval applied on every axis, m/s².
    pub xdd: [f64; 2],
    /// Velocity interval applied on every axis, m/s.
    pub xd: [f64; 2],
}

/// Serial chain of revolute joints on a fixed base.
#[derive(Debug, Clone)]
pub struct RobotModel {
    pub name: String,
    pub gravity: Vector3<f64>,
    pub joints: Vec<JointSpec>,
    /// Default tracked point, expressed in the last joint frame.
    pub end_effector: Vector3<f64>,
    /// Cartesian axes reported for the tracked point (x=0, y=1, z=2).
    pub task_axes: Vec<usize>,
    pub cartesian_limits: Option<CartesianLimits>,
}

/// Joint positions and velocities at the start of a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
}

impl RobotState {
    pub fn new(q: DVector<f64>, qd: DVector<f64>) -> Self {
        Self { q, qd }
    }

    pub fn at_rest(q: DVector<f64>) -> Self {
        let n = q.len();
        Self {
            q,
            qd: DVector::zeros(n),
        }
    }

    /// Checks that `q` and `qd` lie inside the model's position and velocity boxes.
    pub fn check_within(&self, model: &RobotModel) -> Result<()> {
        let n = model.dof();
        check_len("q", n, self.q.len())?;
        check_len("qd", n, self.qd.len())?;
        for (i, j) in model.joints.iter().enumerate() {
            if !j.q_limits.contains(self.q[i]) {
                return Err(Error::StateOutOfLimits(format!(
                    "joint {} position {} outside [{}, {}]",
                    i + 1,
                    self.q[i], j.q_limits.min, j.q_limits.max
                )));
            }
            if !j.qd_limits.contains(self.qd[i]) {
                return Err(Error::StateOutOfLimits(format!(
                    "joint {} velocity {} outside [{}, {}]",
                    i + 1,
                    self.qd[i], j.qd_limits.min, j.qd_limits.max
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}

/// Rigid object attached to the last link.
#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub mass: f64,
    /// Center of mass in the last joint frame.
    pub com: Vector3<f64>,
    /// Inertia about the payload's own center of mass.
    pub inertia: Matrix3<f64>,
}

impl Payload {
    pub fn point_mass(mass: f64, com: Vector3<f64>) -> Self {
        Self {
            mass,
            com,
            inertia: Matrix3::zeros(),
        }
    }
}

impl RobotModel {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn tau_limits(&self) -> impl Iterator<Item = Limits> + '_ {
        self.joints.iter().map(|j| j.tau_limits)
    }

    pub fn last_frame(&self) -> usize {
        self.joints.len() - 1
    }

    /// Task coordinates of a world position, zero-padded to three entries.
    pub fn task_coords(&self, world: &Vector3<f64>) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for (k, &axis) in self.task_axes.iter().enumerate() {
            out[k] = world[axis];
        }
        out
    }

    pub fn with_gravity(mut self, gravity: Vector3<f64>) -> Self {
        self.gravity = gravity;
        self
    }

    /// Validates every model invariant, naming the offending joint on failure.
    pub fn validate(&self) -> Result<()> {
        if self.joints.is_empty() {
            return Err(Error::Validation("model has no joints".into()));
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(Error::Validation("gravity must be finite".into()));
        }
        if self.task_axes.is_empty()
            || self.task_axes.len() > 3
            || self.task_axes.iter().any(|&a| a > 2)
            || self.task_axes.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Validation(format!(
                "task_axes {:?} must be strictly increasing indices in 0..3",
                self.task_axes
            )));
        }
        for (i, j) in self.joints.iter().enumerate() {
            let joint = i + 1;
            if ((j.axis.norm()) - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "joint {joint}: axis is not unit length (|axis| = {})",
                    j.axis.norm()
                )));
            }
            for (name, lim) in [("tau", j.tau_limits), ("qd", j.qd_limits), ("q", j.q_limits)] {
                if !lim.is_valid() {
                    return Err(Error::Validation(format!(
                        "joint {joint}: {name} limits require min < max, got [{}, {}]",
                        lim.min, lim.max
                    )));
                }
            }
            if !(j.link_mass >= 0.0) || !j.link_mass.is_finite() {
                return Err(Error::Validation(format!(
                    "joint {joint}: link mass must be finite and non-negative"
                )));
            }
            check_inertia(&j.link_inertia)
                .map_err(|m| Error::Validation(format!("joint {joint}: {m}")))?;
        }
        if let Some(c) = &self.cartesian_limits {
            if !(c.xdd[0] < c.xdd[1]) || !(c.xd[0] < c.xd[1]) {
                return Err(Error::Validation(
                    "cartesian_limits require min < max".into(),
                ));
            }
        }
        Ok(())
    }

    /// Returns a copy with `payload` rigidly merged into the last link.
    pub fn augment_payload(&self, payload: &Payload) -> Result<RobotModel> {
        if !(payload.mass >= 0.0) || !payload.mass.is_finite() {
            return Err(Error::Validation(format!(
                "payload mass must be non-negative, got {}",
                payload.mass
            )));
        }
        check_inertia(&payload.inertia).map_err(|m| Error::Validation(format!("payload: {m}")))?;

        let mut out = self.clone();
        if payload.mass == 0.0 && payload.inertia == Matrix3::zeros() {
            return Ok(out);
        }
        let link = out.joints.last_mut().expect("validated model has joints");
        let (m1, c1, i1) = (link.link_mass, link.link_com, link.link_inertia);
        let (m2, c2, i2) = (payload.mass, payload.com, payload.inertia);
        let mass = m1 + m2;
        let com = if mass > 0.0 {
            (c1 * m1 + c2 * m2) / mass
        } else {
            c1
        };
        link.link_mass = mass;
        link.link_com = com;
        link.link_inertia = i1 + parallel_axis(m1, &(c1 - com)) + i2 + parallel_axis(m2, &(c2 - com));
        Ok(out)
    }
}

/// Inertia of a point mass `m` at offset `d`.
pub(crate) fn parallel_axis(m: f64, d: &Vector3<f64>) -> Matrix3<f64> {
    (Matrix3::identity() * d.norm_squared() - d * d.transpose()) * m
}

fn check_inertia(i: &Matrix3<f64>) -> std::result::Result<(), String> {
    if !i.iter().all(|v| v.is_finite()) {
        return Err("inertia has non-finite entries".into());
    }
    let scale = i.abs().max().max(1.0);
    if (i - i.transpose()).abs().max() > 1e-9 * scale {
        return Err("inertia tensor is not symmetric".into());
    }
    let eig = i.symmetric_eigenvalues();
    if eig.min() < -1e-12 * scale {
        return Err(format!(
            "inertia tensor is not positive semi-definite (min eigenvalue {})",
            eig.min()
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON robot description
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    name: String,
    gravity: [f64; 3],
    joints: Vec<JointDoc>,
    #[serde(default)]
    end_effector: Option<[f64; 3]>,
    #[serde(default)]
    task_axes: Option<Vec<usize>>,
    #[serde(default)]
    cartesian_limits: Option<CartesianLimits>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OriginDoc {
    xyz: [f64; 3],
    rpy: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDoc {
    origin: OriginDoc,
    axis: [f64; 3],
    mass: f64,
    com: [f64; 3],
    /// `[ixx, iyy, izz, ixy, ixz, iyz]`
    inertia: [f64; 6],
    tau: [f64; 2],
    qd: [f64; 2],
    q: [f64; 2],
}

pub(crate) fn inertia_from_components(c: &[f64; 6]) -> Matrix3<f64> {
    let [ixx, iyy, izz, ixy, ixz, iyz] = *c;
    Matrix3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz)
}

pub(crate) fn origin_transform(xyz: [f64; 3], rpy: [f64; 3]) -> Isometry3<f64> {
    Isometry3::from_parts(
        Translation3::new(xyz[0], xyz[1], xyz[2]),
        UnitQuaternion::from_euler_angles(rpy[0], rpy[1], rpy[2]),
    )
}

/// Parses and validates a robot description document.
pub fn load_robot(document: &str) -> Result<RobotModel> {
    let doc: RobotDoc = serde_json::from_str(document)?;
    let joints = doc
        .joints
        .iter()
        .map(|j| JointSpec {
            origin: origin_transform(j.origin.xyz, j.origin.rpy),
            axis: Vector3::from(j.axis),
            link_mass: j.mass,
            link_com: Vector3::from(j.com),
            link_inertia: inertia_from_components(&j.inertia),
            tau_limits: Limits::new(j.tau[0], j.tau[1]),
            qd_limits: Limits::new(j.qd[0], j.qd[1]),
            q_limits: Limits::new(j.q[0], j.q[1]),
        })
        .collect();
    let model = RobotModel {
        name: doc.name,
        gravity: Vector3::from(doc.gravity),
        joints,
        end_effector: doc.end_effector.map(Vector3::from).unwrap_or_else(Vector3::zeros),
        task_axes: doc.task_axes.unwrap_or_else(|| vec![0, 1, 2]),
        cartesian_limits: doc.cartesian_limits,
    };
    model.validate()?;
    Ok(model)
}

/// Reads and parses a robot description file.
pub fn load_robot_file(path: impl AsRef<std::path::Path>) -> Result<RobotModel> {
    let text = std::fs::read_to_string(path)?;
    load_robot(&text)
}
