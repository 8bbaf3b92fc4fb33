use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use reachspan_core::benchmark::{
    run_benchmark, simulate_point, summarize, timing_run, write_report_csv, write_summary_csv, write_timing_csv,
    BenchmarkConfig,
};
use reachspan_core::dynamics::RobotModel;
use reachspan_core::horizon::{add_environment, build_projection, HorizonSpec};
use reachspan_core::polytope::{export_mesh, ichm, link_reachable_in, MeshFormat, Polytope, PolytopeDocument};
use serde_json::json;

use crate::scenario::{load_scenario, resolve_robot, Scenario};
use crate::{BenchmarkArgs, Format, InfoArgs, LinksArgs, PolytopeArgs, TimingArgs};

/// Exit code when a requested polytope turned out empty or could not be exported.
const INCOMPLETE: u8 = 2;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("--{name} must be positive, got {v}");
    }
    Ok(())
}

fn horizons_for(cli: &[f64], scenario: &Scenario) -> Result<Vec<f64>> {
    let list = if cli.is_empty() {
        match scenario.t_h {
            Some(t) => vec![t],
            None => bail!("no horizon: pass --horizons or set t_h in the scenario"),
        }
    } else {
        cli.to_vec()
    };
    for &t in &list {
        check_positive("horizons", t)?;
    }
    Ok(list)
}

fn stem(base: &str, t_h: f64, many: bool) -> String {
    if many {
        format!("{base}_th{t_h}")
    } else {
        base.to_string()
    }
}

fn units(poly: &Polytope) -> &'static str {
    if poly.dim() == 2 {
        "m^2"
    } else {
        "m^3"
    }
}

/// Writes the requested mesh formats; returns false when OBJ export was impossible.
fn write_meshes(poly: &Polytope, out: &Path, stem: &str, formats: &[Format]) -> Result<bool> {
    let mut complete = true;
    for f in formats {
        let (fmt, ext) = match f {
            Format::Obj => (MeshFormat::Obj, "obj"),
            Format::Json => (MeshFormat::Json, "json"),
            Format::Csv => continue,
        };
        let path = out.join(format!("{stem}.{ext}"));
        match export_mesh(poly, fmt) {
            Ok(bytes) => fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                complete = false;
            }
        }
    }
    Ok(complete)
}

fn write_stub(poly: &Polytope, out: &Path, stem: &str) -> Result<()> {
    let path = out.join(format!("{stem}.json"));
    let doc = serde_json::to_vec_pretty(&PolytopeDocument::from_polytope(poly))?;
    fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))
}

pub fn polytope(args: &PolytopeArgs) -> Result<ExitCode> {
    check_positive("delta", args.delta)?;
    check_positive("dt", args.dt)?;
    let sc = load_scenario(&args.scenario)?;
    let horizons = horizons_for(&args.horizons, &sc)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let many = horizons.len() > 1;
    let mut complete = true;
    for &t_h in &horizons {
        let name = stem("polytope", t_h, many);
        let start = Instant::now();
        let mut problem = build_projection(&sc.model, &sc.state, &HorizonSpec::new(t_h)?, sc.frame, &sc.local_point)?;
        if let Some(env) = &sc.environment {
            problem = add_environment(&problem, env)?;
        }
        let poly = ichm(&problem, args.delta)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if poly.is_empty() {
            println!("t_h = {t_h} s: empty reachable set");
            write_stub(&poly, &args.out, &name)?;
            complete = false;
            continue;
        }
        println!(
            "t_h = {t_h} s: {} vertices, {} faces, volume {:.6e} {}, {ms:.1} ms",
            poly.vertices().len(),
            poly.faces().len(),
            poly.volume(),
            units(&poly)
        );
        complete &= write_meshes(&poly, &args.out, &name, &args.format)?;
        if args.trajectories {
            let dir = args.out.join(format!("{name}_trajectories"));
            fs::create_dir_all(&dir)?;
            for (k, tau) in poly.witnesses().unwrap_or_default().iter().enumerate() {
                let traj = simulate_point(&sc.model, &sc.state, tau, t_h, args.dt, sc.frame, &sc.local_point)?;
                traj.write_csv(BufWriter::new(File::create(dir.join(format!("vertex_{k}.csv")))?))?;
            }
        }
    }
    Ok(if complete { ExitCode::SUCCESS } else { ExitCode::from(INCOMPLETE) })
}

fn obj_block(poly: &Polytope, name: &str, offset: usize, out: &mut String) -> usize {
    use std::fmt::Write as _;
    writeln!(out, "o {name}").expect("string write");
    for v in poly.vertices() {
        writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).expect("string write");
    }
    for f in poly.faces() {
        let idx: Vec<String> = f.vertices.iter().map(|i| (i + 1 + offset).to_string()).collect();
        writeln!(out, "f {}", idx.join(" ")).expect("string write");
    }
    poly.vertices().len()
}

pub fn links(args: &LinksArgs) -> Result<ExitCode> {
    check_positive("delta", args.delta)?;
    let sc = load_scenario(&args.scenario)?;
    if sc.links.is_empty() {
        bail!("scenario {} defines no links", args.scenario.display());
    }
    let horizons = horizons_for(&args.horizons, &sc)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let many = horizons.len() > 1;
    let mut complete = true;
    for &t_h in &horizons {
        let horizon = HorizonSpec::new(t_h)?;
        let mut scene_obj = String::new();
        let mut scene_json = Vec::new();
        let mut offset = 0;
        for link in &sc.links {
            let start = Instant::now();
            let res = link_reachable_in(&sc.model, &sc.state, &link.envelope, &horizon, args.delta, sc.environment.as_ref())?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let poly = &res.polytope;
            let name = stem(&format!("link_{}", link.name), t_h, many);
            if !res.skipped.is_empty() {
                eprintln!("link {}: envelope points {:?} have no feasible torque", link.name, res.skipped);
            }
            if poly.is_empty() {
                println!("t_h = {t_h} s, link {}: empty reachable set", link.name);
                write_stub(poly, &args.out, &name)?;
                complete = false;
                continue;
            }
            println!(
                "t_h = {t_h} s, link {}: {} vertices, {} faces, volume {:.6e} {}, {ms:.1} ms",
                link.name,
                poly.vertices().len(),
                poly.faces().len(),
                poly.volume(),
                units(poly)
            );
            complete &= write_meshes(poly, &args.out, &name, &args.format)?;
            if poly.dim() == 3 && poly.affine_dim() == 3 {
                offset += obj_block(poly, &link.name, offset, &mut scene_obj);
            }
            scene_json.push(json!({ "name": link.name, "polytope": PolytopeDocument::from_polytope(poly) }));
        }
        let scene = stem("scene", t_h, many);
        if args.format.contains(&Format::Obj) && !scene_obj.is_empty() {
            fs::write(args.out.join(format!("{scene}.obj")), scene_obj)?;
        }
        if args.format.contains(&Format::Json) {
            let doc = json!({ "t_h": t_h, "links": scene_json });
            fs::write(args.out.join(format!("{scene}.json")), serde_json::to_vec_pretty(&doc)?)?;
        }
    }
    Ok(if complete { ExitCode::SUCCESS } else { ExitCode::from(INCOMPLETE) })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.prec$}"))
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<ExitCode> {
    check_positive("delta", args.delta)?;
    check_positive("dt", args.dt)?;
    for &t in &args.horizons {
        check_positive("horizons", t)?;
    }
    if let Some(eps) = args.m1_eps {
        if !(eps >= 0.0) {
            bail!("--m1-eps must be non-negative, got {eps}");
        }
    }
    let model = resolve_robot(&args.robot, None)?;
    let cfg = BenchmarkConfig {
        horizons: args.horizons.clone(),
        configs: args.configs,
        seed: args.seed,
        dt: args.dt,
        delta: args.delta,
        m1_eps: args.m1_eps,
        cube_variant: args.cube_variant.into(),
        sample_velocity: args.sample_velocity,
    };
    let run = run_benchmark(&model, &cfg)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let metrics = args.out.join("metrics.csv");
    write_report_csv(&run.rows, BufWriter::new(File::create(&metrics)?), args.deterministic)?;
    let summary = summarize(&run.rows);
    write_summary_csv(&summary, BufWriter::new(File::create(args.out.join("summary.csv"))?))?;
    if args.format.contains(&Format::Json) {
        let doc = json!({
            "robot": model.name,
            "config": cfg,
            "simulator": "velocity clamped to its box each step; joints reaching a position limit are pinned with zero velocity",
            "failures": run.failures.len(),
            "summary": summary,
        });
        fs::write(args.out.join("summary.json"), serde_json::to_vec_pretty(&doc)?)?;
    }

    println!("{:>6} {:>5} {:>15} {:>15} {:>15} {:>11} {:>11}", "t_h", "rows", "m1", "m2", "m3", "vol_Px", "vol_Cx");
    for s in &summary {
        println!(
            "{:>6} {:>5} {:>7}±{:<7} {:>7}±{:<7} {:>7}±{:<7} {:>11.3e} {:>11}",
            s.t_h,
            s.rows,
            fmt_opt(s.mean_m1, 3),
            fmt_opt(s.std_m1, 3),
            fmt_opt(s.mean_m2, 3),
            fmt_opt(s.std_m2, 3),
            fmt_opt(s.mean_m3, 3),
            fmt_opt(s.std_m3, 3),
            s.mean_vol_px,
            s.mean_vol_cx.map_or_else(|| "NA".into(), |v| format!("{v:.3e}")),
        );
    }
    if !run.failures.is_empty() {
        eprintln!("{} (configuration, horizon) pairs failed and were skipped", run.failures.len());
    }
    println!("report written to {}", metrics.display());
    Ok(ExitCode::SUCCESS)
}

pub fn timing(args: &TimingArgs) -> Result<ExitCode> {
    check_positive("delta", args.delta)?;
    for &t in &args.horizons {
        check_positive("horizons", t)?;
    }
    let model = resolve_robot(&args.robot, None)?;
    let cells = timing_run(&model, &args.horizons, args.configs, &args.env_rows, args.seed, args.delta)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join("timing.csv");
    write_timing_csv(&cells, BufWriter::new(File::create(&path)?))?;
    println!("{:>6} {:>9} {:>10} {:>10} {:>10}", "t_h", "env_rows", "mean_ms", "std_ms", "infeasible");
    for c in &cells {
        println!("{:>6} {:>9} {:>10.2} {:>10.2} {:>10}", c.t_h, c.env_rows, c.mean_ms, c.std_ms, c.infeasible);
    }
    println!("timing table written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn describe(model: &RobotModel, q: &DVector<f64>) -> Result<()> {
    println!("robot: {}", model.name);
    println!("joints: {}", model.dof());
    println!("gravity: [{}, {}, {}]", model.gravity.x, model.gravity.y, model.gravity.z);
    println!("task axes: {:?}", model.task_axes);
    println!("{:>3} {:>7} {:>17} {:>17} {:>17}", "j", "mass", "tau", "qd", "q");
    for (i, j) in model.joints.iter().enumerate() {
        println!(
            "{:>3} {:>7.3} {:>17} {:>17} {:>17}",
            i + 1,
            j.link_mass,
            format!("[{}, {}]", j.tau_limits.min, j.tau_limits.max),
            format!("[{}, {}]", j.qd_limits.min, j.qd_limits.max),
            format!("[{}, {}]", j.q_limits.min, j.q_limits.max),
        );
    }
    if let Some(c) = &model.cartesian_limits {
        println!("cartesian limits: xdd [{}, {}], xd [{}, {}]", c.xdd[0], c.xdd[1], c.xd[0], c.xd[1]);
    }
    let x = model.forward_kinematics(q, model.last_frame(), &model.end_effector)?;
    println!("end effector at q = {:?}: [{:.4}, {:.4}, {:.4}]", q.as_slice(), x.x, x.y, x.z);
    Ok(())
}

pub fn info(args: &InfoArgs) -> Result<ExitCode> {
    if let Some(path) = &args.scenario {
        let sc = load_scenario(path)?;
        describe(&sc.model, &sc.state.q)?;
        if let Some(t) = sc.t_h {
            println!("horizon: {t} s");
        }
        if let Some(env) = &sc.environment {
            println!("environment rows: {}", env.rows());
        }
        for link in &sc.links {
            println!("link envelope {}: {} points", link.name, link.envelope.points().len());
        }
    } else if let Some(robot) = &args.robot {
        let model = resolve_robot(robot, None)?;
        let mid = DVector::from_iterator(model.dof(), model.joints.iter().map(|j| 0.5 * (j.q_limits.min + j.q_limits.max)));
        describe(&model, &mid)?;
    }
    Ok(ExitCode::SUCCESS)
}
