//! Axis-aligned box from constant Cartesian velocity and acceleration limits.

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::CartesianLimits;
use crate::error::{Error, Result};
use crate::polytope::Polytope;

/// How the velocity limit restricts the admissible acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeVariant {
    /// `ẍ t_h ∈ [ẋ_min, ẋ_max]`, ignoring the current velocity.
    #[default]
    Literal,
    /// `ẋ_k + ẍ t_h ∈ [ẋ_min, ẋ_max]`.
    WithCurrentVelocity,
}

/// Box of positions `ẍ t_h²/2 + ẋ_k t_h + x_k` over the admissible accelerations on each axis.
pub fn cube_baseline(
    x_k: &DVector<f64>,
    xd_k: &DVector<f64>,
    limits: &CartesianLimits,
    t_h: f64,
    variant: CubeVariant,
) -> Result<Polytope> {
    let m = x_k.len();
    if !(m == 2 || m == 3) || xd_k.len() != m {
        return Err(Error::DimensionMismatch {
            what: "cube baseline state",
            expected: m,
            got: xd_k.len(),
        });
    }
    if !(t_h > 0.0 && t_h.is_finite()) {
        return Err(Error::Validation(format!("horizon must be positive, got {t_h}")));
    }
    if !limits.xdd.iter().chain(&limits.xd).all(|v| v.is_finite()) {
        return Err(Error::Validation("Cartesian limits must be finite".into()));
    }
    let mut lo = Vector3::zeros();
    let mut hi = Vector3::zeros();
    for i in 0..m {
        let shift = match variant {
            CubeVariant::Literal => 0.0,
            CubeVariant::WithCurrentVelocity => xd_k[i],
        };
        let a_lo = limits.xdd[0].max((limits.xd[0] - shift) / t_h);
        let a_hi = limits.xdd[1].min((limits.xd[1] - shift) / t_h);
        if a_lo > a_hi {
            return Err(Error::EmptyInterval {
                axis: i,
                lo: a_lo,
                hi: a_hi,
            });
        }
        let base = xd_k[i] * t_h + x_k[i];
        lo[i] = a_lo * t_h * t_h / 2.0 + base;
        hi[i] = a_hi * t_h * t_h / 2.0 + base;
    }
    let corners: Vec<Vector3<f64>> = (0..1usize << m)
        .map(|mask| Vector3::from_fn(|i, _| if i < m && mask >> i & 1 == 1 { hi[i] } else { lo[i] }))
        .collect();
    Ok(Polytope::from_points(m, &corners, 0.0))
}
