//! The Lyapunov function `V(x, y) = |π - y| + |π - x|` and its discrete
//! orbital derivative `V̇(p) = V(F(p)) - V(p)`.
//!
//! With the auxiliary functions
//!
//! ```text
//! ξ₁ = π - y            ξ₂ = ξ₁ - 2a sin y - a sin x
//! ξ₃ = π - x            ξ₄ = ξ₃ - 2a sin x - a sin y
//! ```
//!
//! one has `V̇ = |ξ₂| - |ξ₁| + |ξ₄| - |ξ₃|`. On `A1` the signs of all four are
//! known piecewise, which yields the closed forms
//!
//! ```text
//! AL:  -3a sin y - 3a sin x
//! AM:  2x - 2π - a sin y + a sin x
//! AR:  -a sin y + a sin x
//! ```
//!
//! The definitional form is authoritative; the closed forms are what the
//! certifier bounds.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{contains, RegionId};
use crate::map::{apply_f, MapParams, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiValues {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub xi4: f64,
}

#[inline]
pub fn v(p: PhasePoint) -> f64 {
    (PI - p.y).abs() + (PI - p.x).abs()
}

pub fn xi_values(p: PhasePoint, params: &MapParams) -> XiValues {
    let a = params.a();
    let (sx, sy) = (p.x.sin(), p.y.sin());
    let xi1 = PI - p.y;
    let xi3 = PI - p.x;
    XiValues {
        xi1,
        xi2: xi1 - 2.0 * a * sy - a * sx,
        xi3,
        xi4: xi3 - 2.0 * a * sx - a * sy,
    }
}

/// `V(F(p)) - V(p)`.
#[inline]
pub fn orbital_derivative(p: PhasePoint, params: &MapParams) -> f64 {
    v(apply_f(p, params)) - v(p)
}

/// `|ξ₂| - |ξ₁| + |ξ₄| - |ξ₃|`, the same quantity expanded.
pub fn orbital_derivative_xi(p: PhasePoint, params: &MapParams) -> f64 {
    let xi = xi_values(p, params);
    xi.xi2.abs() - xi.xi1.abs() + xi.xi4.abs() - xi.xi3.abs()
}

/// One of the three closed forms of `V̇`, evaluated anywhere in the plane.
#[inline]
pub fn closed_form(region: RegionId, p: PhasePoint, params: &MapParams) -> Result<f64> {
    let a = params.a();
    let (sx, sy) = (p.x.sin(), p.y.sin());
    match region {
        RegionId::AL => Ok(-3.0 * a * sy - 3.0 * a * sx),
        RegionId::AM => Ok(2.0 * p.x - 2.0 * PI - a * sy + a * sx),
        RegionId::AR => Ok(-a * sy + a * sx),
        other => Err(Error::UnsupportedRegion(other)),
    }
}

/// `V̇` on `A1` through the closed form of the piece containing `p`.
///
/// On shared boundaries the forms agree; the label goes to the first of
/// `AL`, `AM`, `AR` that contains the point.
pub fn orbital_derivative_closed_form(p: PhasePoint, params: &MapParams) -> Result<(f64, RegionId)> {
    p.ensure_finite()?;
    let region = [RegionId::AL, RegionId::AM, RegionId::AR]
        .into_iter()
        .find(|&r| contains(r, p, params))
        .ok_or(Error::OutOfRegion { x: p.x, y: p.y })?;
    let value = closed_form(region, p, params)?;
    debug_assert!(
        (value - orbital_derivative(p, params)).abs() <= 1e-9,
        "closed form {region:?} disagrees with V(F(p)) - V(p) at {p:?}"
    );
    Ok((value, region))
}
