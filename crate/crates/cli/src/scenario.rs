//! Scenario files: a robot, its state at the start of the horizon, and optional extras.
//!
//! ```json
//! {
//!   "robot": "generic7.json",
//!   "q": [0, 0, 0, -1.5708, 0, 1.885, 0],
//!   "qd": [0, 0, 0, 0, 0, 0, 0],
//!   "t_h": 0.15,
//!   "payload": { "mass": 2.0, "com": [0, 0, 0.21] },
//!   "environment": { "A": [[0, 0, -1]], "b": [-0.5] },
//!   "links": [{ "name": "forearm", "envelope": { "segment": { "start": { "frame": 3 }, "end": { "frame": 4 } } } }]
//! }
//! ```
//!
//! `robot` is resolved relative to the scenario file; the names `planar2` and
//! `generic7` refer to the bundled descriptions when no such file exists.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::{DVector, Matrix3, Vector3};
use reachspan_core::dynamics::{load_robot_file, Payload, RobotModel, RobotState};
use reachspan_core::fixtures;
use reachspan_core::horizon::EnvironmentConstraints;
use reachspan_core::polytope::LinkEnvelope;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    robot: String,
    q: Vec<f64>,
    #[serde(default)]
    qd: Option<Vec<f64>>,
    #[serde(default)]
    t_h: Option<f64>,
    #[serde(default)]
    frame: Option<usize>,
    #[serde(default)]
    local_point: Option<[f64; 3]>,
    #[serde(default)]
    payload: Option<PayloadDoc>,
    #[serde(default)]
    environment: Option<EnvironmentDoc>,
    #[serde(default)]
    links: Vec<LinkDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayloadDoc {
    mass: f64,
    /// Defaults to the end-effector point.
    #[serde(default)]
    com: Option<[f64; 3]>,
    /// `[ixx, iyy, izz, ixy, ixz, iyz]` about the payload's center of mass.
    #[serde(default)]
    inertia: Option<[f64; 6]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub name: String,
    pub envelope: LinkEnvelope,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: RobotModel,
    pub state: RobotState,
    pub t_h: Option<f64>,
    pub frame: usize,
    pub local_point: Vector3<f64>,
    pub environment: Option<EnvironmentConstraints>,
    pub links: Vec<LinkDoc>,
}

/// Loads a robot description from a path, or a bundled one by name.
pub fn resolve_robot(name: &str, base: Option<&Path>) -> Result<RobotModel> {
    let path = match base {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    if !path.exists() {
        match name {
            "planar2" => return Ok(fixtures::planar2()),
            "generic7" => return Ok(fixtures::generic7()),
            _ => {}
        }
    }
    load_robot_file(&path).with_context(|| format!("loading robot description {}", path.display()))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
    let doc: ScenarioDoc = serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
    let mut model = resolve_robot(&doc.robot, path.parent())?;

    if let Some(p) = &doc.payload {
        let com = p.com.map_or(model.end_effector, Vector3::from);
        let inertia = match p.inertia {
            Some([xx, yy, zz, xy, xz, yz]) => Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz),
            None => Matrix3::zeros(),
        };
        model = model.augment_payload(&Payload { mass: p.mass, com, inertia })?;
    }

    let n = model.dof();
    if doc.q.len() != n {
        bail!("scenario q has {} entries but the robot has {n} joints", doc.q.len());
    }
    let qd = doc.qd.unwrap_or_else(|| vec![0.0; n]);
    if qd.len() != n {
        bail!("scenario qd has {} entries but the robot has {n} joints", qd.len());
    }
    let state = RobotState::new(DVector::from_vec(doc.q), DVector::from_vec(qd));
    state.check_within(&model)?;

    if let Some(t) = doc.t_h {
        if !(t > 0.0 && t.is_finite()) {
            bail!("scenario t_h must be positive, got {t}");
        }
    }

    let environment = match doc.environment {
        Some(env) => {
            if env.a.len() != env.b.len() {
                bail!("environment has {} rows in A but {} entries in b", env.a.len(), env.b.len());
            }
            let rows: Vec<(Vec<f64>, f64)> = env.a.into_iter().zip(env.b).collect();
            Some(EnvironmentConstraints::from_rows(model.task_axes.len(), &rows)?)
        }
        None => None,
    };
    for link in &doc.links {
        link.envelope.validate(&model).with_context(|| format!("link `{}`", link.name))?;
    }

    Ok(Scenario {
        frame: doc.frame.unwrap_or_else(|| model.last_frame()),
        local_point: doc.local_point.map_or(model.end_effector, Vector3::from),
        state,
        t_h: doc.t_h,
        environment,
        links: doc.links,
        model,
    })
}
