use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::map::{apply_f, jacobian_f, MapParams, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FixedPointKind {
    Source,
    Saddle,
    Sink,
}

impl FixedPointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FixedPointKind::Source => "source",
            FixedPointKind::Saddle => "saddle",
            FixedPointKind::Sink => "sink",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointRecord {
    pub location: PhasePoint,
    /// Row-major `DF` at the fixed point.
    pub jacobian: [[f64; 2]; 2],
    /// Real eigenvalues, largest first.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors matching `eigenvalues`.
    pub eigenvectors: [[f64; 2]; 2],
    pub kind: FixedPointKind,
    pub hyperbolic: bool,
    /// `|F(p) - p|∞`.
    pub residual: f64,
}

const HYPERBOLIC_GAP: f64 = 1e-12;

/// Real eigenpairs of a 2×2 matrix with real spectrum, largest eigenvalue
/// first. Eigenvalues come from the real Schur form; `None` for a complex
/// pair.
pub fn eigen_decomposition(m: &Matrix2<f64>) -> Option<([f64; 2], [[f64; 2]; 2])> {
    let ev = m.eigenvalues()?;
    let (l0, l1) = if ev[0] >= ev[1] { (ev[0], ev[1]) } else { (ev[1], ev[0]) };
    Some(([l0, l1], [eigenvector(m, l0, 0), eigenvector(m, l1, 1)]))
}

// Null vector of M - λI from whichever row is better conditioned. For a
// scalar matrix every vector qualifies; fall back to the coordinate axes.
fn eigenvector(m: &Matrix2<f64>, lambda: f64, fallback_axis: usize) -> [f64; 2] {
    let r0 = Vector2::new(m[(0, 1)], lambda - m[(0, 0)]);
    let r1 = Vector2::new(lambda - m[(1, 1)], m[(1, 0)]);
    let v = if r0.norm() >= r1.norm() { r0 } else { r1 };
    let n = v.norm();
    if n <= 1e-14 * (1.0 + m.amax()) {
        let mut axis = [0.0; 2];
        axis[fallback_axis] = 1.0;
        return axis;
    }
    let mut u = v / n;
    if u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0) {
        u = -u;
    }
    [u[0], u[1]]
}

/// Source, saddle or sink from the eigenvalue moduli, plus hyperbolicity.
pub fn classify(eigenvalues: [f64; 2]) -> (FixedPointKind, bool) {
    let [m0, m1] = eigenvalues.map(f64::abs);
    let hyperbolic = (m0 - 1.0).abs() > HYPERBOLIC_GAP && (m1 - 1.0).abs() > HYPERBOLIC_GAP;
    let kind = match (m0 > 1.0, m1 > 1.0) {
        (true, true) => FixedPointKind::Source,
        (false, false) => FixedPointKind::Sink,
        _ => FixedPointKind::Saddle,
    };
    (kind, hyperbolic)
}

// Residual below which a lattice point is kept as is. Only the rounding of
// sin(π) contributes there.
const LATTICE_RESIDUAL: f64 = 1e-14;

// Newton on G(p) = F(p) - p.
fn refine(p: PhasePoint, params: &MapParams) -> PhasePoint {
    let mut q = p;
    let mut res = apply_f(q, params).dist_inf(&q);
    for _ in 0..5 {
        if res <= LATTICE_RESIDUAL {
            break;
        }
        let g = apply_f(q, params) - q;
        let jac = jacobian_f(q, params) - Matrix2::identity();
        let Some(inv) = jac.try_inverse() else { break };
        let step = inv * Vector2::new(g.x, g.y);
        let trial = PhasePoint::new(q.x - step[0], q.y - step[1]);
        let tres = apply_f(trial, params).dist_inf(&trial);
        if tres >= res {
            break;
        }
        q = trial;
        res = tres;
    }
    q
}

/// The nine fixed points in `[0, 2π]²`: the lattice `{0, π, 2π}²`.
pub fn find_fixed_points(params: &MapParams) -> Vec<FixedPointRecord> {
    let grid = [0.0, PI, TAU];
    grid.iter()
        .flat_map(|&y| grid.iter().map(move |&x| PhasePoint::new(x, y)))
        .map(|p| {
            let location = refine(p, params);
            let jac = jacobian_f(location, params);
            let (eigenvalues, eigenvectors) =
                eigen_decomposition(&jac).expect("DF at a lattice point is symmetric or has real spectrum");
            let (kind, hyperbolic) = classify(eigenvalues);
            FixedPointRecord {
                location,
                jacobian: [[jac[(0, 0)], jac[(0, 1)]], [jac[(1, 0)], jac[(1, 1)]]],
                eigenvalues,
                eigenvectors,
                kind,
                hyperbolic,
                residual: apply_f(location, params).dist_inf(&location),
            }
        })
        .collect()
}
