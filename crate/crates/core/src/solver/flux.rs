//! Regularized face flux `z = M(u) s/|s|_eps + eps s` and its derivatives.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{mobility_derivative, mobility_eval, MobilityLaw};

/// How the two cell mobilities adjacent to a face are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceMobility {
    /// `(M_l + M_r) / 2`.
    ArithmeticMean,
    /// `max(M_l, M_r)`. Makes the flux nondecreasing in `u_right` and
    /// nonincreasing in `u_left` for any monotone law, and carries the
    /// saturated flux across an unresolved boundary layer.
    #[default]
    Max,
}

/// Shared regularization parameters of one discrete problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    pub eps: f64,
    /// Truncation level: mobilities see `min(|u|, 1/delta)`.
    pub delta: f64,
    pub face_mobility: FaceMobility,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceFlux {
    pub z: f64,
    pub w: f64,
    pub dz_dleft: f64,
    pub dz_dright: f64,
}

impl FaceFlux {
    pub const ZERO: FaceFlux = FaceFlux { z: 0.0, w: 0.0, dz_dleft: 0.0, dz_dright: 0.0 };
}

/// Mobility of one cell value and its derivative in `u`.
fn cell_mobility(law: &MobilityLaw, u: f64, reg: &Regularization) -> Result<(f64, f64)> {
    let cap = 1.0 / reg.delta;
    let a = u.abs();
    let s = a.min(cap);
    let value = mobility_eval(law, s, reg.eps)?;
    let ds_du = if a < cap { if u >= 0.0 { 1.0 } else { -1.0 } } else { 0.0 };
    let deriv = if ds_du == 0.0 { 0.0 } else { mobility_derivative(law, s, reg.eps)? * ds_du };
    Ok((value, deriv))
}

/// Flux and director across a face of width `h` between two values.
pub fn face_flux(
    u_left: f64,
    u_right: f64,
    h: f64,
    law: &MobilityLaw,
    reg: &Regularization,
) -> Result<(f64, f64)> {
    let f = face_flux_jac(u_left, u_right, h, law, reg)?;
    Ok((f.z, f.w))
}

pub fn face_flux_jac(
    u_left: f64,
    u_right: f64,
    h: f64,
    law: &MobilityLaw,
    reg: &Regularization,
) -> Result<FaceFlux> {
    let eps = reg.eps;
    let s = (u_right - u_left) / h;
    let (ml, dml) = cell_mobility(law, u_left, reg)?;
    let (mr, dmr) = cell_mobility(law, u_right, reg)?;
    let (m, dm_dl, dm_dr) = match reg.face_mobility {
        FaceMobility::ArithmeticMean => (0.5 * (ml + mr), 0.5 * dml, 0.5 * dmr),
        FaceMobility::Max if ml >= mr => (ml, dml, 0.0),
        FaceMobility::Max => (mr, 0.0, dmr),
    };
    let norm = s.hypot(eps);
    let w = if norm > 0.0 { s / norm } else { 0.0 };
    // dw/ds = eps^2 / |s|_eps^3
    let dw_ds = if norm > 0.0 { (eps / norm) * (eps / norm) / norm } else { 0.0 };
    let z = m * w + eps * s;
    let dz_ds = m * dw_ds + eps;
    Ok(FaceFlux {
        z,
        w,
        dz_dleft: dm_dl * w - dz_ds / h,
        dz_dright: dm_dr * w + dz_ds / h,
    })
}
