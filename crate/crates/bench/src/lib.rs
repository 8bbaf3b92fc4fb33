//! Shared workloads for the criterion benches.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reachspan_core::benchmark::{random_configurations, random_environment};
use reachspan_core::dynamics::RobotModel;
use reachspan_core::fixtures;
use reachspan_core::horizon::{add_environment, build_projection, HorizonSpec, ProjectionProblem};

/// End-effector projection problems of `generic7` at random configurations,
/// each with `env_rows` random environment rows.
pub fn projection_problems(t_h: f64, count: usize, env_rows: usize, seed: u64) -> Vec<ProjectionProblem> {
    let model = fixtures::generic7();
    problems_for(&model, t_h, count, env_rows, seed)
}

pub fn problems_for(model: &RobotModel, t_h: f64, count: usize, env_rows: usize, seed: u64) -> Vec<ProjectionProblem> {
    let horizon = HorizonSpec::new(t_h).expect("positive horizon");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    random_configurations(model, count, seed, false)
        .iter()
        .map(|state| {
            let p = build_projection(model, state, &horizon, model.last_frame(), &model.end_effector).expect("projection");
            if env_rows == 0 {
                return p;
            }
            let env = random_environment(&p, model, env_rows, &mut rng).expect("environment");
            add_environment(&p, &env).expect("environment rows")
        })
        .collect()
}

/// Points uniform in the unit ball of dimension `dim`.
pub fn ball_points(n: usize, dim: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        if v.norm() <= 1.0 {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_have_requested_shape() {
        let ps = projection_problems(0.15, 2, 10, 1);
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].a().nrows(), ps[0].n_limit_rows() + 10);
        let pts = ball_points(50, 3, 0);
        assert!(pts.iter().all(|p| p.len() == 3 && p.norm() <= 1.0));
    }
}
