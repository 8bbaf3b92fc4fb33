mod common;

use nalgebra::{DMatrix, DVector, Vector3};
use reachspan_core::benchmark::random_configurations;
use reachspan_core::dynamics::{RobotModel, RobotState};
use reachspan_core::fixtures;
use reachspan_core::horizon::{add_environment, build_projection, EnvironmentConstraints, HorizonSpec, ProjectionProblem};
use reachspan_core::polytope::ichm;

const DELTA: f64 = 1e-3;

fn problem(model: &RobotModel, state: &RobotState, t_h: f64) -> ProjectionProblem {
    build_projection(model, state, &HorizonSpec::new(t_h).unwrap(), model.last_frame(), &model.end_effector).unwrap()
}

#[test]
fn witness_torques_respect_every_joint_box() {
    let model = fixtures::generic7();
    for (k, state) in random_configurations(&model, 5, 21, true).iter().enumerate() {
        for t_h in [0.05, 0.25] {
            let prob = problem(&model, state, t_h);
            let poly = ichm(&prob, DELTA).unwrap();
            if poly.is_empty() {
                continue;
            }
            let lin = prob.linearization().unwrap();
            for tau in poly.witnesses().unwrap() {
                let (q, qd) = lin.joint_prediction(tau);
                for (i, j) in model.joints.iter().enumerate() {
                    let tol = 1e-7;
                    assert!(j.tau_limits.min - tol <= tau[i] && tau[i] <= j.tau_limits.max + tol, "config {k} tau {i}");
                    assert!(j.qd_limits.min - tol <= qd[i] && qd[i] <= j.qd_limits.max + tol, "config {k} qd {i}");
                    assert!(j.q_limits.min - tol <= q[i] && q[i] <= j.q_limits.max + tol, "config {k} q {i}");
                }
            }
        }
    }
}

#[test]
fn environment_order_does_not_matter() {
    let model = fixtures::generic7();
    let state = RobotState::at_rest(DVector::from_vec(fixtures::generic7_home()));
    let prob = problem(&model, &state, 0.15);
    let x = prob.x_star();
    let e1 = EnvironmentConstraints::from_rows(3, &[(vec![0.0, 0.0, 1.0], x[2] + 0.02), (vec![1.0, 0.0, 0.0], x[0] + 0.03)]).unwrap();
    let e2 = EnvironmentConstraints::from_rows(3, &[(vec![0.0, -1.0, 0.0], -x[1] + 0.01)]).unwrap();
    let a = ichm(&add_environment(&add_environment(&prob, &e1).unwrap(), &e2).unwrap(), DELTA).unwrap();
    let b = ichm(&add_environment(&add_environment(&prob, &e2).unwrap(), &e1).unwrap(), DELTA).unwrap();
    assert!(!a.is_empty());
    assert!(common::hausdorff(&a, &b) <= DELTA);
    assert!((a.volume() - b.volume()).abs() <= 1e-3 * a.volume());
}

#[test]
fn zero_gravity_rest_state_is_point_symmetric() {
    // No bias torque, symmetric torque and velocity boxes, and joint positions at
    // the centre of their ranges: τ ↦ −τ maps the feasible set onto itself.
    let model = fixtures::generic7().with_gravity(Vector3::zeros());
    let q = DVector::from_iterator(7, model.joints.iter().map(|j| 0.5 * (j.q_limits.min + j.q_limits.max)));
    let state = RobotState::at_rest(q);
    let prob = problem(&model, &state, 0.1);
    let poly = ichm(&prob, DELTA).unwrap();
    let xk = prob.linearization().unwrap().x_k.clone();
    let centre = Vector3::new(xk[0], xk[1], xk[2]);
    for v in poly.vertices() {
        let mirrored = centre * 2.0 - v;
        assert!(common::distance_to_polytope(&poly, &mirrored) <= DELTA);
    }
}

#[test]
fn vanishing_horizon_collapses_to_current_position() {
    let model = fixtures::generic7();
    for state in random_configurations(&model, 5, 4, false) {
        let prob = problem(&model, &state, 1e-6);
        let poly = ichm(&prob, DELTA).unwrap();
        let xk = &prob.linearization().unwrap().x_k;
        for v in poly.vertices() {
            let d = (DVector::from_column_slice(v.as_slice()) - xk).norm();
            assert!(d <= 1e-9, "vertex {d} m from x_k");
        }
    }
}

#[test]
fn table_and_wall_clip_the_end_effector_polytope() {
    let model = fixtures::generic7();
    let state = RobotState::at_rest(DVector::from_vec(fixtures::generic7_home()));
    let prob = problem(&model, &state, 0.15);
    let env = EnvironmentConstraints::new(
        DMatrix::from_row_slice(2, 3, &[0.0, 0.0, -1.0, 0.0, -1.0, 0.0]),
        DVector::from_vec(vec![-0.5, 0.2]),
    )
    .unwrap();
    let free = ichm(&prob, DELTA).unwrap();
    let clipped = ichm(&add_environment(&prob, &env).unwrap(), DELTA).unwrap();
    assert!(clipped.vertices().iter().all(|v| v.z >= 0.5 - DELTA && v.y >= -0.2 - DELTA));
    assert!(clipped.volume() < free.volume());
    // clipping only removes points: the clipped hull sits inside the free one
    assert!(clipped.vertices().iter().all(|v| free.contains(v, DELTA)));
}
