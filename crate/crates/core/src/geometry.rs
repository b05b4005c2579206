//! Region catalogue of the phase plane and the curve Γ.
//!
//! All regions are closed: boundaries belong to the set. Interior tests go
//! through [`contains_with_margin`], where the margin is an ∞-norm distance
//! to each bounding line.
//!
//! `A1` is the hexagon with vertices `(0,0), (π/2,-π/2), (π,0), (3π/2,-π/2),
//! (2π,0), (π,π)`. It splits into `AL`, `AM` (left of `x = π`, separated by
//! Γ) and `AR` (right of `x = π`). `A2..A4` are the images of `A1` under the
//! symmetries. The sectors `S1..S4` are the parts of the basin `S` of `(π, π)`
//! lying in `A1..A4`; basin membership is decided by iterating the map.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{steps_to_sink, MapParams, PhasePoint};
use crate::symmetry::{SymmetryId, SymmetryMap};

/// Iteration budget and capture radius for deciding membership of the basin `S`.
pub const BASIN_TEST_MAX_ITER: usize = 20_000;
pub const BASIN_TEST_RADIUS: f64 = 1e-9;

const ROOT_BISECTION_STEPS: usize = 64;
const ROOT_NEWTON_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionId {
    D,
    S1,
    S2,
    S3,
    S4,
    A1,
    A2,
    A3,
    A4,
    AL,
    AM,
    AR,
}

impl RegionId {
    pub const ALL: [RegionId; 12] = [
        RegionId::D,
        RegionId::S1,
        RegionId::S2,
        RegionId::S3,
        RegionId::S4,
        RegionId::A1,
        RegionId::A2,
        RegionId::A3,
        RegionId::A4,
        RegionId::AL,
        RegionId::AM,
        RegionId::AR,
    ];

    pub fn compact(j: SymmetryId) -> RegionId {
        match j {
            SymmetryId::Phi1 => RegionId::A1,
            SymmetryId::Phi2 => RegionId::A2,
            SymmetryId::Phi3 => RegionId::A3,
            SymmetryId::Phi4 => RegionId::A4,
        }
    }

    pub fn sector(j: SymmetryId) -> RegionId {
        match j {
            SymmetryId::Phi1 => RegionId::S1,
            SymmetryId::Phi2 => RegionId::S2,
            SymmetryId::Phi3 => RegionId::S3,
            SymmetryId::Phi4 => RegionId::S4,
        }
    }

    /// True for the three pieces on which the orbital derivative has a
    /// closed form.
    pub fn is_subregion(self) -> bool {
        matches!(self, RegionId::AL | RegionId::AM | RegionId::AR)
    }
}

/// A line constraint `n·p <= c`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    n: [f64; 2],
    c: f64,
}

impl HalfPlane {
    const fn new(nx: f64, ny: f64, c: f64) -> Self {
        Self { n: [nx, ny], c }
    }

    /// Signed ∞-norm distance to the line, positive inside.
    #[inline]
    fn slack(&self, p: PhasePoint) -> f64 {
        (self.c - (self.n[0] * p.x + self.n[1] * p.y)) / (self.n[0].abs() + self.n[1].abs())
    }
}

// 0 <= x <= π, -x <= y <= x, y >= x - π
const A1_LEFT: [HalfPlane; 5] = [
    HalfPlane::new(-1.0, 0.0, 0.0),
    HalfPlane::new(1.0, 0.0, PI),
    HalfPlane::new(-1.0, 1.0, 0.0),
    HalfPlane::new(-1.0, -1.0, 0.0),
    HalfPlane::new(1.0, -1.0, PI),
];

// π <= x <= 2π, π - x <= y <= 2π - x, y >= x - 2π
const A1_RIGHT: [HalfPlane; 5] = [
    HalfPlane::new(-1.0, 0.0, -PI),
    HalfPlane::new(1.0, 0.0, TAU),
    HalfPlane::new(1.0, 1.0, TAU),
    HalfPlane::new(-1.0, -1.0, -PI),
    HalfPlane::new(1.0, -1.0, TAU),
];

fn piece_slack(piece: &[HalfPlane], p: PhasePoint) -> f64 {
    piece.iter().map(|h| h.slack(p)).fold(f64::INFINITY, f64::min)
}

/// Depth of `p` inside `A1`: non-negative iff `p ∈ A1`.
pub fn a1_slack(p: PhasePoint) -> f64 {
    piece_slack(&A1_LEFT, p).max(piece_slack(&A1_RIGHT, p))
}

/// Vertices of the two convex halves of `A1`, counter-clockwise.
pub fn a1_convex_pieces() -> [[PhasePoint; 4]; 2] {
    [
        [
            PhasePoint::new(0.0, 0.0),
            PhasePoint::new(FRAC_PI_2, -FRAC_PI_2),
            PhasePoint::new(PI, 0.0),
            PhasePoint::new(PI, PI),
        ],
        [
            PhasePoint::new(PI, 0.0),
            PhasePoint::new(3.0 * FRAC_PI_2, -FRAC_PI_2),
            PhasePoint::new(TAU, 0.0),
            PhasePoint::new(PI, PI),
        ],
    ]
}

/// The four lower edges of `A1`, where the orbital derivative vanishes.
pub fn a1_lower_edges() -> [(PhasePoint, PhasePoint); 4] {
    [
        (PhasePoint::new(0.0, 0.0), PhasePoint::new(FRAC_PI_2, -FRAC_PI_2)),
        (PhasePoint::new(FRAC_PI_2, -FRAC_PI_2), PhasePoint::new(PI, 0.0)),
        (PhasePoint::new(PI, 0.0), PhasePoint::new(3.0 * FRAC_PI_2, -FRAC_PI_2)),
        (PhasePoint::new(3.0 * FRAC_PI_2, -FRAC_PI_2), PhasePoint::new(TAU, 0.0)),
    ]
}

/// Closed polygon of a compact region (first vertex repeated at the end).
pub fn region_boundary(r: RegionId) -> Option<Vec<PhasePoint>> {
    let a1 = [
        PhasePoint::new(0.0, 0.0),
        PhasePoint::new(FRAC_PI_2, -FRAC_PI_2),
        PhasePoint::new(PI, 0.0),
        PhasePoint::new(3.0 * FRAC_PI_2, -FRAC_PI_2),
        PhasePoint::new(TAU, 0.0),
        PhasePoint::new(PI, PI),
        PhasePoint::new(0.0, 0.0),
    ];
    let image = |j: SymmetryId| a1.iter().map(|&p| SymmetryMap::of(j).apply(p)).collect();
    match r {
        RegionId::D => Some(vec![
            PhasePoint::new(0.0, 0.0),
            PhasePoint::new(TAU, 0.0),
            PhasePoint::new(TAU, TAU),
            PhasePoint::new(0.0, TAU),
            PhasePoint::new(0.0, 0.0),
        ]),
        RegionId::A1 => Some(a1.to_vec()),
        RegionId::A2 => Some(image(SymmetryId::Phi2)),
        RegionId::A3 => Some(image(SymmetryId::Phi3)),
        RegionId::A4 => Some(image(SymmetryId::Phi4)),
        _ => None,
    }
}

/// `H_y(x) = π - x - 2a sin x - a sin y`, i.e. ξ₄ at fixed `y`.
#[inline]
fn xi4_at(x: f64, y: f64, a: f64) -> f64 {
    PI - x - 2.0 * a * x.sin() - a * y.sin()
}

/// The unique zero of `x ↦ ξ₄(x, y)` for any real `y`. It lies in
/// `[π - 3a, π + 3a]` since `|2a sin x + a sin y| <= 3a`, and in `[π - 3a, π]`
/// when `sin y >= 0`.
pub fn xi4_root(y: f64, params: &MapParams) -> Result<f64> {
    let a = params.a();
    let (mut lo, mut hi) = if y.sin() >= 0.0 {
        (PI - 3.0 * a, PI)
    } else {
        (PI - 3.0 * a, PI + 3.0 * a)
    };
    // H is strictly decreasing in x
    if xi4_at(lo, y, a) < 0.0 || xi4_at(hi, y, a) > 0.0 {
        return Err(Error::BracketFailure { y });
    }
    for _ in 0..ROOT_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if xi4_at(mid, y, a) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..ROOT_NEWTON_STEPS {
        let h = xi4_at(x, y, a);
        if h == 0.0 {
            break;
        }
        x -= h / (-1.0 - 2.0 * a * x.cos());
    }
    Ok(x)
}

/// The curve Γ: `x = γ(y)` solving `ξ₄(x, y) = 0` for `y ∈ [0, π]`.
pub fn gamma_of_y(y: f64, params: &MapParams, tol: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&y) {
        return Err(Error::InvalidArgument(format!(
            "gamma is defined for y in [0, pi], got {y}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let x = xi4_root(y, params)?;
    let residual = xi4_at(x, y, params.a()).abs();
    if residual > tol {
        return Err(Error::NonConvergence {
            iterations: ROOT_BISECTION_STEPS + ROOT_NEWTON_STEPS,
            residual,
        });
    }
    Ok(x)
}

/// Minimum of γ, attained at `y = π/2` by the symmetry `sin(π/2 - t) = sin(π/2 + t)`.
pub fn gamma_min(params: &MapParams) -> Result<(f64, f64)> {
    Ok((FRAC_PI_2, gamma_of_y(FRAC_PI_2, params, 1e-13)?))
}

/// Γ sampled at `n + 1` evenly spaced heights from `y = 0` to `y = π`.
pub fn gamma_polyline(params: &MapParams, n: usize) -> Result<Vec<PhasePoint>> {
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            let y = if i == n { PI } else { PI * i as f64 / n as f64 };
            gamma_of_y(y, params, 1e-13).map(|x| PhasePoint::new(x, y))
        })
        .collect()
}

/// Closed-set membership.
pub fn contains(r: RegionId, p: PhasePoint, params: &MapParams) -> bool {
    contains_with_margin(r, p, params, 0.0)
}

/// Membership with every bounding inequality tightened by `margin`.
/// A positive margin tests interiority; basin membership for the sectors is
/// not affected by it.
pub fn contains_with_margin(r: RegionId, p: PhasePoint, params: &MapParams, margin: f64) -> bool {
    match r {
        RegionId::D => p.x.min(TAU - p.x).min(p.y).min(TAU - p.y) >= margin,
        RegionId::A1 => a1_slack(p) >= margin,
        RegionId::A2 | RegionId::A3 | RegionId::A4 => {
            let j = match r {
                RegionId::A2 => SymmetryId::Phi2,
                RegionId::A3 => SymmetryId::Phi3,
                _ => SymmetryId::Phi4,
            };
            a1_slack(SymmetryMap::of(j).apply(p)) >= margin
        }
        RegionId::AL => {
            a1_slack(p) >= margin && PI - p.x >= margin && xi4_root(p.y, params).is_ok_and(|g| g - p.x >= margin)
        }
        RegionId::AM => {
            a1_slack(p) >= margin && PI - p.x >= margin && xi4_root(p.y, params).is_ok_and(|g| p.x - g >= margin)
        }
        RegionId::AR => a1_slack(p) >= margin && p.x - PI >= margin,
        RegionId::S1 | RegionId::S2 | RegionId::S3 | RegionId::S4 => {
            let j = match r {
                RegionId::S1 => SymmetryId::Phi1,
                RegionId::S2 => SymmetryId::Phi2,
                RegionId::S3 => SymmetryId::Phi3,
                _ => SymmetryId::Phi4,
            };
            contains_with_margin(RegionId::compact(j), p, params, margin) && in_basin(p, params)
        }
    }
}

/// Membership of the open basin `S` of `(π, π)` in the plane.
pub fn in_basin(p: PhasePoint, params: &MapParams) -> bool {
    steps_to_sink(p, params, BASIN_TEST_MAX_ITER, BASIN_TEST_RADIUS, false).is_some()
}

/// Axis-aligned box `(x0, x1, y0, y1)` enclosing the region.
pub fn bounding_box(r: RegionId) -> (f64, f64, f64, f64) {
    let a1 = (0.0, TAU, -FRAC_PI_2, PI);
    let image = |j: SymmetryId| {
        let s = SymmetryMap::of(j);
        let c0 = s.apply(PhasePoint::new(a1.0, a1.2));
        let c1 = s.apply(PhasePoint::new(a1.1, a1.3));
        (c0.x.min(c1.x), c0.x.max(c1.x), c0.y.min(c1.y), c0.y.max(c1.y))
    };
    match r {
        RegionId::D => (0.0, TAU, 0.0, TAU),
        RegionId::A1 | RegionId::S1 => a1,
        RegionId::A2 | RegionId::S2 => image(SymmetryId::Phi2),
        RegionId::A3 | RegionId::S3 => image(SymmetryId::Phi3),
        RegionId::A4 | RegionId::S4 => image(SymmetryId::Phi4),
        RegionId::AL => (0.0, PI, -FRAC_PI_2, PI),
        RegionId::AM => (0.0, PI, 0.0, PI),
        RegionId::AR => (PI, TAU, -FRAC_PI_2, PI),
    }
}

/// `n` seeded uniform samples of a region, drawn by rejection from its
/// bounding box. Gives up after `1000 n` draws and returns what it has.
pub fn sample_region(r: RegionId, params: &MapParams, n: usize, seed: u64) -> Vec<PhasePoint> {
    let (x0, x1, y0, y1) = bounding_box(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let budget = n.saturating_mul(1000);
    for _ in 0..budget {
        if out.len() == n {
            break;
        }
        let p = PhasePoint::new(rng.random_range(x0..=x1), rng.random_range(y0..=y1));
        if contains(r, p, params) {
            out.push(p);
        }
    }
    out
}

/// ∞-norm distance from `p` to the segment `[a, b]`.
pub fn dist_inf_to_segment(p: PhasePoint, a: PhasePoint, b: PhasePoint) -> f64 {
    // f(t) = max(|u - t dx|, |v - t dy|) is convex and piecewise linear in t;
    // its minimum over [0,1] sits at an endpoint, a kink, or a crossing.
    let (u, v) = (p.x - a.x, p.y - a.y);
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let f = |t: f64| (u - t * dx).abs().max((v - t * dy).abs());
    let mut best = f(0.0).min(f(1.0));
    let mut consider = |t: f64| {
        if t.is_finite() && (0.0..=1.0).contains(&t) {
            best = best.min(f(t));
        }
    };
    if dx != 0.0 {
        consider(u / dx);
    }
    if dy != 0.0 {
        consider(v / dy);
    }
    if dx != dy {
        consider((u - v) / (dx - dy));
    }
    if dx != -dy {
        consider((u + v) / (dx + dy));
    }
    best
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn dist_to_segment(p: PhasePoint, a: PhasePoint, b: PhasePoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.x - (a.x + t * dx)).hypot(p.y - (a.y + t * dy))
}
