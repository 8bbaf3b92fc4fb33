//! Bundled robot descriptions.

use nalgebra::{Isometry3, Matrix3, Vector3};

use crate::dynamics::{load_robot, JointSpec, Limits, RobotModel};

pub const PLANAR2_JSON: &str = include_str!("../fixtures/planar2.json");
pub const GENERIC7_JSON: &str = include_str!("../fixtures/generic7.json");

/// Two-link planar arm, unit lengths, 1 kg point masses at the link tips.
pub fn planar2() -> RobotModel {
    load_robot(PLANAR2_JSON).expect("bundled planar2 description is valid")
}

/// Seven-joint arm with Panda-like geometry and round-number inertias.
pub fn generic7() -> RobotModel {
    load_robot(GENERIC7_JSON).expect("bundled generic7 description is valid")
}

/// Initial pose of `generic7` used by the benchmarks.
pub fn generic7_home() -> Vec<f64> {
    use std::f64::consts::PI;
    vec![0.0, 0.0, 0.0, -PI / 2.0, 0.0, 3.0 * PI / 5.0, 0.0]
}

/// Single revolute joint about z carrying point mass `mass` at distance `length` along x.
pub fn pendulum(mass: f64, length: f64, gravity: Vector3<f64>) -> RobotModel {
    RobotModel {
        name: "pendulum".into(),
        gravity,
        joints: vec![JointSpec {
            origin: Isometry3::identity(),
            axis: Vector3::z(),
            link_mass: mass,
            link_com: Vector3::new(length, 0.0, 0.0),
            link_inertia: Matrix3::zeros(),
            tau_limits: Limits::new(-10.0, 10.0),
            qd_limits: Limits::new(-5.0, 5.0),
            q_limits: Limits::new(-3.0, 3.0),
        }],
        end_effector: Vector3::new(length, 0.0, 0.0),
        task_axes: vec![0, 1],
        cartesian_limits: None,
    }
}
