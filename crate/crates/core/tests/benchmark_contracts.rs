use nalgebra::{DVector, Vector3};
use reachspan_core::benchmark::{
    collect_reached, metric_m1, random_configurations, run_benchmark, simulate, step_count, summarize, write_report_csv,
    BenchmarkConfig, REPORT_COLUMNS,
};
use reachspan_core::fixtures;
use reachspan_core::horizon::{build_projection, HorizonSpec};
use reachspan_core::polytope::ichm;

const DELTA: f64 = 1e-3;

#[test]
fn planar_short_horizon_point_count_and_containment() {
    let model = fixtures::planar2();
    let states = random_configurations(&model, 10, 5, false);
    let mut m1 = Vec::new();
    for state in &states {
        let prob = build_projection(&model, state, &HorizonSpec::new(0.05).unwrap(), 1, &model.end_effector).unwrap();
        let poly = ichm(&prob, DELTA).unwrap();
        let reached = collect_reached(&model, state, &poly, 0.05, 0.005).unwrap();
        assert_eq!(reached.steps, 10);
        assert_eq!(reached.points.len(), 10 * poly.vertices().len());
        m1.push(metric_m1(&reached.points, &poly, DELTA).unwrap());
    }
    let mean = m1.iter().sum::<f64>() / m1.len() as f64;
    assert!(mean >= 0.9, "mean m1 {mean}");
}

#[test]
fn first_step_stays_within_acceleration_bound() {
    let model = fixtures::generic7();
    let frame = model.last_frame();
    let dt = 1e-3;
    for state in random_configurations(&model, 4, 8, false) {
        let prob = build_projection(&model, &state, &HorizonSpec::new(0.05).unwrap(), frame, &model.end_effector).unwrap();
        let poly = ichm(&prob, DELTA).unwrap();
        let lin = prob.linearization().unwrap();
        let xk = Vector3::new(lin.x_k[0], lin.x_k[1], lin.x_k[2]);
        // ‖ẍ‖ ≤ ‖J‖ ‖M⁻¹‖ max‖τ − τ_d‖ over the torque box
        let tau_span = DVector::from_iterator(
            7,
            model.tau_limits().zip(lin.tau_d.iter()).map(|(l, d)| (l.max - d).abs().max((l.min - d).abs())),
        );
        let j_norm = lin.jacobian.singular_values().max();
        let m_inv_norm = lin.m_inv.singular_values().max();
        let xdd_max = j_norm * m_inv_norm * tau_span.norm();
        for tau in poly.witnesses().unwrap() {
            let traj = simulate(&model, &state, tau, dt, dt).unwrap();
            let first = traj.samples.first().unwrap().x;
            assert!((first - xk).norm() <= xdd_max * dt * dt);
            assert!(poly.contains(&first, DELTA));
        }
    }
}

#[test]
fn halving_the_horizon_does_not_hurt_containment() {
    let model = fixtures::planar2();
    for t_h in [0.1, 0.2, 0.4] {
        let cfg = BenchmarkConfig {
            horizons: vec![t_h / 2.0, t_h],
            configs: 20,
            seed: 31,
            ..BenchmarkConfig::default()
        };
        let summary = summarize(&run_benchmark(&model, &cfg).unwrap().rows);
        let short = summary[0].mean_m1.unwrap();
        let long = summary[1].mean_m1.unwrap();
        assert!(short >= long - 0.05, "t_h {t_h}: {short} vs {long}");
    }
}

#[test]
fn report_has_one_row_per_config_and_horizon() {
    let model = fixtures::planar2();
    let cfg = BenchmarkConfig {
        horizons: vec![0.05, 0.25],
        configs: 10,
        seed: 2,
        ..BenchmarkConfig::default()
    };
    let rows = run_benchmark(&model, &cfg).unwrap().rows;
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| (w[0].config_id, w[0].t_h) < (w[1].config_id, w[1].t_h)));
    for r in &rows {
        if let Some(m2) = r.m2 {
            assert!((0.0..=1.0).contains(&m2));
        }
        if let Some(m1) = r.m1 {
            assert!((0.0..=1.0).contains(&m1));
        }
    }
    let mut buf = Vec::new();
    write_report_csv(&rows, &mut buf, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), REPORT_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn step_count_rounds_to_nearest() {
    assert_eq!(step_count(0.05, 0.005).unwrap(), 10);
    assert_eq!(step_count(0.25, 0.005).unwrap(), 50);
    assert_eq!(step_count(2.0, 0.005).unwrap(), 400);
    assert!(step_count(0.1, -1.0).is_err());
}
