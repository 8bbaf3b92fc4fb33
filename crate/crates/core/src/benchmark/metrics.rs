//! Accuracy ratios comparing a polytope with simulated reachable points.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::Polytope;

/// Fraction of simulated points inside the polytope (within `eps`).
pub fn metric_m1(points: &[Vector3<f64>], poly: &Polytope, eps: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::UndefinedMetric("m1 needs at least one simulated point"));
    }
    let inside = points.iter().filter(|p| poly.contains(p, eps)).count();
    Ok(inside as f64 / points.len() as f64)
}

/// Hull of the simulated points that lie inside the polytope (no tolerance, so it is a subset).
pub fn contained_hull(points: &[Vector3<f64>], poly: &Polytope) -> Polytope {
    let inside: Vec<Vector3<f64>> = points.iter().filter(|p| poly.contains(p, 0.0)).copied().collect();
    Polytope::from_points(poly.dim(), &inside, 0.0)
}

/// `vol(CH(𝓧 ∩ 𝓟)) / vol(𝓟)`; `None` when the polytope has no volume.
pub fn metric_m2(points: &[Vector3<f64>], poly: &Polytope) -> Option<f64> {
    let v = poly.volume();
    (v > 0.0).then(|| contained_hull(points, poly).volume() / v)
}

/// `vol(𝓟) / vol(CH(𝓧))`; `None` when the simulated hull has no volume.
pub fn metric_m3(points: &[Vector3<f64>], poly: &Polytope) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let r2 = Polytope::from_points(poly.dim(), points, 0.0).volume();
    (r2 > 0.0).then(|| poly.volume() / r2)
}

/// All three ratios and the volumes behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub m1: f64,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub vol_px: f64,
    pub vol_r1: f64,
    pub vol_r2: f64,
}

pub fn evaluate(points: &[Vector3<f64>], poly: &Polytope, eps: f64) -> Result<Metrics> {
    let m1 = metric_m1(points, poly, eps)?;
    let vol_px = poly.volume();
    let vol_r1 = contained_hull(points, poly).volume();
    let vol_r2 = Polytope::from_points(poly.dim(), points, 0.0).volume();
    Ok(Metrics {
        m1,
        m2: (vol_px > 0.0).then(|| vol_r1 / vol_px),
        m3: (vol_r2 > 0.0).then(|| vol_px / vol_r2),
        vol_px,
        vol_r1,
        vol_r2,
    })
}
