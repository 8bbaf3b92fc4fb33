use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reachspan_core::dynamics::{RobotModel, RobotState};
use reachspan_core::fixtures;

fn random_q(model: &RobotModel, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_iterator(model.dof(), model.joints.iter().map(|j| rng.random_range(j.q_limits.min..j.q_limits.max)))
}

fn random_qd(model: &RobotModel, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_iterator(model.dof(), model.joints.iter().map(|j| rng.random_range(j.qd_limits.min..j.qd_limits.max)))
}

fn models() -> Vec<RobotModel> {
    vec![fixtures::planar2(), fixtures::generic7()]
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-6;
    for model in models() {
        let frame = model.last_frame();
        let local = model.end_effector;
        for _ in 0..20 {
            let q = random_q(&model, &mut rng);
            let jac = model.jacobian(&q, frame, &local).unwrap();
            for i in 0..model.dof() {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[i] += h;
                qm[i] -= h;
                let fd = (model.forward_kinematics(&qp, frame, &local).unwrap()
                    - model.forward_kinematics(&qm, frame, &local).unwrap())
                    / (2.0 * h);
                assert!((fd - jac.column(i)).norm() < 1e-5, "{}: column {i}", model.name);
            }
        }
    }
}

#[test]
fn jdot_qdot_matches_directional_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    for model in models() {
        let frame = model.last_frame();
        let local = model.end_effector;
        for _ in 0..20 {
            let q = random_q(&model, &mut rng);
            let qd = random_qd(&model, &mut rng);
            let jp = model.jacobian(&(&q + &qd * h), frame, &local).unwrap();
            let jm = model.jacobian(&(&q - &qd * h), frame, &local).unwrap();
            let fd: DVector<f64> = (jp - jm) / (2.0 * h) * &qd;
            let an = model.jdot_qdot(&q, &qd, frame, &local).unwrap();
            let an = DVector::from_column_slice(an.as_slice());
            assert!((fd - an).norm() < 1e-4, "{}", model.name);
        }
    }
}

#[test]
fn mass_matrix_symmetric_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for model in models() {
        for _ in 0..100 {
            let q = random_q(&model, &mut rng);
            let m = model.mass_matrix(&q);
            assert!((&m - m.transpose()).abs().max() < 1e-9);
            assert!(m.clone().cholesky().is_some());
            let x = DVector::from_fn(model.dof(), |_, _| rng.random_range(-1.0..1.0));
            assert!(x.dot(&(&m * &x)) > 0.0);
        }
    }
}

#[test]
fn forward_inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for model in models() {
        for _ in 0..50 {
            let q = random_q(&model, &mut rng);
            let qd = random_qd(&model, &mut rng);
            let tau_d = model.bias_torque(&q, &qd);
            let qdd = model.forward_dynamics(&q, &qd, &tau_d).unwrap();
            assert!(qdd.norm() < 1e-9);

            let tau = DVector::from_iterator(model.dof(), model.tau_limits().map(|l| rng.random_range(l.min..l.max)));
            let qdd = model.forward_dynamics(&q, &qd, &tau).unwrap();
            let residual = model.mass_matrix(&q) * &qdd + &tau_d - &tau;
            assert!(residual.norm() < 1e-9 * tau.norm().max(1.0));
            let id = model.inverse_dynamics(&q, &qd, &qdd);
            assert!((id - &tau).norm() < 1e-9 * tau.norm().max(1.0));
        }
    }
}

#[test]
fn kinetic_energy_conserved_without_gravity_or_torque() {
    let dt = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for model in models() {
        let model = model.with_gravity(Vector3::zeros());
        let n = model.dof();
        for _ in 0..5 {
            let mut q = random_q(&model, &mut rng);
            let mut qd = random_qd(&model, &mut rng) * 0.3;
            let e0 = model.kinetic_energy(&q, &qd);
            for _ in 0..1000 {
                let qdd = model.forward_dynamics(&q, &qd, &DVector::zeros(n)).unwrap();
                q += &qd * dt + &qdd * (0.5 * dt * dt);
                qd += qdd * dt;
            }
            let e1 = model.kinetic_energy(&q, &qd);
            assert!((e1 - e0).abs() < 0.01 * e0, "{}: {e0} -> {e1}", model.name);
        }
    }
}

#[test]
fn closed_form_two_link_mass_matrix() {
    // point masses at the link tips: M11 = m1 l1² + m2(l1² + 2 l1 l2 c2 + l2²)
    let model = fixtures::planar2();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let q = random_q(&model, &mut rng);
        let c2 = q[1].cos();
        let expect = DMatrix::from_row_slice(2, 2, &[3.0 + 2.0 * c2, 1.0 + c2, 1.0 + c2, 1.0]);
        assert!((model.mass_matrix(&q) - expect).abs().max() < 1e-12);
    }
}

#[test]
fn payload_scales_dynamics_consistently() {
    let model = fixtures::generic7();
    let q = DVector::from_vec(fixtures::generic7_home());
    let state = RobotState::at_rest(q.clone());
    let heavy = model
        .augment_payload(&reachspan_core::dynamics::Payload::point_mass(2.0, Vector3::new(0.0, 0.0, 0.1)))
        .unwrap();
    let m0 = model.mass_matrix(&state.q);
    let m1 = heavy.mass_matrix(&state.q);
    let diff = m1 - m0;
    // added inertia is positive semi-definite
    assert!(diff.symmetric_eigenvalues().min() > -1e-9);
    assert!(diff.norm() > 0.0);
}
