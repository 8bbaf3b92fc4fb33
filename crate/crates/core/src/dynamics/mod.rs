//! Serial-chain kinematics and rigid-body dynamics for revolute manipulators.

mod kinematics;
mod model;
mod rigid_body;

pub use model::{
    load_robot, load_robot_file, CartesianLimits, JointSpec, Limits, Payload, RobotModel,
    RobotState,
};
