//! Reachable space of a whole link: the hull of the polytopes of points that
//! bound it.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hull_union, ichm, Polytope};
use crate::dynamics::{RobotModel, RobotState};
use crate::error::{Error, Result};
use crate::horizon::{add_environment, build_projection, EnvironmentConstraints, HorizonSpec};

/// A point rigidly attached to a link frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkPoint {
    pub frame: usize,
    #[serde(default)]
    pub local_point: Vector3<f64>,
}

impl LinkPoint {
    pub fn new(frame: usize, local_point: Vector3<f64>) -> Self {
        LinkPoint { frame, local_point }
    }
}

/// Convex region bounding a link, given by points whose hull contains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkEnvelope {
    Segment { start: LinkPoint, end: LinkPoint },
    Vertices(Vec<LinkPoint>),
}

impl LinkEnvelope {
    pub fn points(&self) -> Vec<LinkPoint> {
        match self {
            LinkEnvelope::Segment { start, end } => vec![start.clone(), end.clone()],
            LinkEnvelope::Vertices(v) => v.clone(),
        }
    }

    pub fn validate(&self, model: &RobotModel) -> Result<()> {
        let pts = self.points();
        if pts.is_empty() {
            return Err(Error::Validation("link envelope has no points".into()));
        }
        for p in &pts {
            model.check_frame(p.frame)?;
        }
        Ok(())
    }
}

/// Result of [`link_reachable`].
#[derive(Debug, Clone)]
pub struct LinkReachable {
    pub polytope: Polytope,
    /// Envelope points whose own problem was infeasible and contributed nothing.
    pub skipped: Vec<usize>,
}

/// Union of the reachable polytopes of every envelope point.
pub fn link_reachable(
    model: &RobotModel,
    state: &RobotState,
    envelope: &LinkEnvelope,
    horizon: &HorizonSpec,
    delta: f64,
) -> Result<LinkReachable> {
    link_reachable_in(model, state, envelope, horizon, delta, None)
}

/// [`link_reachable`] with optional environment half-spaces applied to every point.
pub fn link_reachable_in(
    model: &RobotModel,
    state: &RobotState,
    envelope: &LinkEnvelope,
    horizon: &HorizonSpec,
    delta: f64,
    env: Option<&EnvironmentConstraints>,
) -> Result<LinkReachable> {
    envelope.validate(model)?;
    let points = envelope.points();
    let polys: Vec<Polytope> = points
        .par_iter()
        .map(|pt| {
            let mut prob = build_projection(model, state, horizon, pt.frame, &pt.local_point)?;
            if let Some(env) = env {
                prob = add_environment(&prob, env)?;
            }
            ichm(&prob, delta)
        })
        .collect::<Result<_>>()?;

    let mut skipped = Vec::new();
    let mut kept = Vec::new();
    for (i, p) in polys.into_iter().enumerate() {
        if p.is_empty() {
            log::warn!("envelope point {i} has an infeasible horizon problem and was skipped");
            skipped.push(i);
        } else {
            kept.push(p);
        }
    }
    let polytope = if kept.is_empty() {
        Polytope::empty(model.task_axes.len(), delta)
    } else {
        hull_union(&kept)?
    };
    Ok(LinkReachable { polytope, skipped })
}
