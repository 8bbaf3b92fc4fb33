use nalgebra::DVector;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{RobotModel, RobotState};

/// Uniform joint positions inside the limits. Velocities are zero unless
/// `sample_velocity` is set, in which case they are uniform inside their box.
pub fn random_configurations(model: &RobotModel, count: usize, seed: u64, sample_velocity: bool) -> Vec<RobotState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_dists: Vec<Uniform<f64>> = model
        .joints
        .iter()
        .map(|j| Uniform::new_inclusive(j.q_limits.min, j.q_limits.max).expect("validated limits"))
        .collect();
    let qd_dists: Vec<Uniform<f64>> = model
        .joints
        .iter()
        .map(|j| Uniform::new_inclusive(j.qd_limits.min, j.qd_limits.max).expect("validated limits"))
        .collect();
    (0..count)
        .map(|_| {
            let q = DVector::from_iterator(model.dof(), q_dists.iter().map(|d| d.sample(&mut rng)));
            let qd = if sample_velocity {
                DVector::from_iterator(model.dof(), qd_dists.iter().map(|d| d.sample(&mut rng)))
            } else {
                DVector::zeros(model.dof())
            };
            RobotState::new(q, qd)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn deterministic_and_within_limits() {
        let model = fixtures::generic7();
        let a = random_configurations(&model, 5, 42, false);
        assert_eq!(a, random_configurations(&model, 5, 42, false));
        assert_ne!(a, random_configurations(&model, 5, 43, false));
        for s in random_configurations(&model, 200, 1, true) {
            s.check_within(&model).unwrap();
        }
    }

    #[test]
    fn per_joint_mean_near_midpoint() {
        let model = fixtures::generic7();
        let states = random_configurations(&model, 10_000, 9, false);
        for (i, j) in model.joints.iter().enumerate() {
            let mean = states.iter().map(|s| s.q[i]).sum::<f64>() / states.len() as f64;
            let mid = 0.5 * (j.q_limits.min + j.q_limits.max);
            assert!((mean - mid).abs() <= 0.05 * j.q_limits.width(), "joint {}", i + 1);
        }
    }
}
