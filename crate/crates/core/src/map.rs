//! The synchronisation diffeomorphism of three clocks on a line.
//!
//! With `x` and `y` the phase differences of the outer clocks relative to the
//! central one, one coupling period maps
//!
//! ```text
//! x' = x + 2a sin x + a sin y
//! y' = y + a sin x + 2a sin y
//! ```
//!
//! The map is 2π-periodic in both coordinates and a diffeomorphism of the
//! plane for `0 < a < 1/6`. Points are kept unwrapped in ℝ²; [`PhasePoint::wrap`]
//! gives the torus view on demand.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Sub};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the open coupling interval.
pub const A_MAX: f64 = 1.0 / 6.0;

/// Residual tolerance used by [`apply_f_inverse`] when callers have no
/// particular requirement.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-13;

const INVERSE_MAX_ITER: usize = 50;

/// The coupling strength `a`, validated to lie in `(0, 1/6)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapParams {
    a: f64,
}

impl MapParams {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 && a < A_MAX {
            Ok(Self { a })
        } else {
            Err(Error::InvalidCoupling(a))
        }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Lower bound on `det DF` over the whole plane: `(1-2a)^2 - a^2`.
    pub fn min_jacobian_det(&self) -> f64 {
        let a = self.a;
        (1.0 - 2.0 * a).powi(2) - a * a
    }

    /// Eigenvalues of `DF` at the sink, dominant first: `1-a` along (1,-1)
    /// and `1-3a` along (1,1).
    pub fn sink_eigenvalues(&self) -> [f64; 2] {
        [1.0 - self.a, 1.0 - 3.0 * self.a]
    }
}

/// A point of the phase plane, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub const SINK: PhasePoint = PhasePoint { x: PI, y: PI };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        let p = Self { x, y };
        p.ensure_finite()?;
        Ok(p)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.x.is_finite() && self.y.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { x: self.x, y: self.y })
        }
    }

    /// Both coordinates reduced into `[0, 2π)`.
    pub fn wrap(&self) -> Self {
        Self {
            x: wrap_angle(self.x),
            y: wrap_angle(self.y),
        }
    }

    #[inline]
    pub fn dist_inf(&self, other: &Self) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// ∞-norm distance on the torus, i.e. minimised over 2π translates.
    pub fn torus_dist_inf(&self, other: &Self) -> f64 {
        centered_angle(self.x - other.x)
            .abs()
            .max(centered_angle(self.y - other.y).abs())
    }

    pub(crate) fn to_vector(self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub(crate) fn from_vector(v: Vector2<f64>) -> Self {
        Self { x: v[0], y: v[1] }
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, rhs: Self) -> Self {
        PhasePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, rhs: Self) -> Self {
        PhasePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Reduce an angle into `[-π, π)`.
pub fn centered_angle(t: f64) -> f64 {
    wrap_angle(t + PI) - PI
}

/// One step of the map.
#[inline]
pub fn apply_f(p: PhasePoint, params: &MapParams) -> PhasePoint {
    let a = params.a;
    let (sx, sy) = (p.x.sin(), p.y.sin());
    // Grouping the increments keeps y = x bit-exactly invariant.
    PhasePoint {
        x: p.x + (2.0 * a * sx + a * sy),
        y: p.y + (a * sx + 2.0 * a * sy),
    }
}

/// Preimage of `p` by damped Newton iteration on `F(q) - p`, starting from `q = p`.
pub fn apply_f_inverse(p: PhasePoint, params: &MapParams, tol: f64) -> Result<PhasePoint> {
    p.ensure_finite()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let target = p.to_vector();
    let residual_of = |q: &Vector2<f64>| apply_f(PhasePoint::from_vector(*q), params).to_vector() - target;

    let mut q = target;
    let mut r = residual_of(&q);
    let mut rnorm = r.amax();
    for _ in 0..INVERSE_MAX_ITER {
        if rnorm <= tol {
            return Ok(PhasePoint::from_vector(q));
        }
        let jac = jacobian_f(PhasePoint::from_vector(q), params);
        // det DF > 0 everywhere for a < 1/6
        let step = jac.try_inverse().expect("Jacobian is nonsingular for a < 1/6") * r;

        let mut lambda = 1.0;
        loop {
            let trial = q - step * lambda;
            let rt = residual_of(&trial);
            let rtnorm = rt.amax();
            if rtnorm < rnorm || lambda < 1e-4 {
                q = trial;
                r = rt;
                rnorm = rtnorm;
                break;
            }
            lambda *= 0.5;
        }
    }
    if rnorm <= tol {
        Ok(PhasePoint::from_vector(q))
    } else {
        Err(Error::NonConvergence {
            iterations: INVERSE_MAX_ITER,
            residual: rnorm,
        })
    }
}

/// `DF(p) = [[1 + 2a cos x, a cos y], [a cos x, 1 + 2a cos y]]`.
pub fn jacobian_f(p: PhasePoint, params: &MapParams) -> Matrix2<f64> {
    let a = params.a;
    let (cx, cy) = (p.x.cos(), p.y.cos());
    Matrix2::new(1.0 + 2.0 * a * cx, a * cy, a * cx, 1.0 + 2.0 * a * cy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

/// A finite orbit segment `p0, F(p0), ..., F^n(p0)` (or the backward
/// analogue).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitTrace {
    points: Vec<PhasePoint>,
    params: MapParams,
    direction: Direction,
}

impl OrbitTrace {
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn last(&self) -> PhasePoint {
        *self.points.last().expect("trace holds at least p0")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<PhasePoint> {
        self.points
    }
}

/// Iterate `n` steps from `p0`.
pub fn iterate(p0: PhasePoint, n: usize, params: &MapParams, direction: Direction) -> Result<OrbitTrace> {
    p0.ensure_finite()?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(p0);
    let mut p = p0;
    for _ in 0..n {
        p = match direction {
            Direction::Forward => apply_f(p, params),
            Direction::Backward => apply_f_inverse(p, params, DEFAULT_INVERSE_TOL)?,
        };
        points.push(p);
    }
    Ok(OrbitTrace {
        points,
        params: *params,
        direction,
    })
}

/// Number of forward steps after which the orbit of `p` enters the
/// ∞-norm ball of the given radius around the sink, or `None` within
/// `max_iter` steps.
///
/// With `on_torus` the distance is taken modulo 2π, so every lattice
/// translate of `(π, π)` counts. Without it only the sink at `(π, π)` itself
/// does, which tests membership of the basin `S` in the plane.
pub fn steps_to_sink(p: PhasePoint, params: &MapParams, max_iter: usize, radius: f64, on_torus: bool) -> Option<usize> {
    let dist = |q: &PhasePoint| {
        if on_torus {
            q.torus_dist_inf(&PhasePoint::SINK)
        } else {
            q.dist_inf(&PhasePoint::SINK)
        }
    };
    let mut q = p;
    for n in 0..=max_iter {
        if dist(&q) <= radius {
            return Some(n);
        }
        if n < max_iter {
            q = apply_f(q, params);
        }
    }
    None
}
