use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::fixed_points::eigen_decomposition;
use crate::error::{Error, Result};
use crate::geometry::dist_to_segment;
use crate::map::{apply_f_inverse, jacobian_f, MapParams, PhasePoint, DEFAULT_INVERSE_TOL};

/// Offset of the seed points from the saddle along its stable eigenvector.
pub const SEED_OFFSET: f64 = 1e-6;
/// Default bound on the polyline segment length.
pub const DEFAULT_ARC_STEP: f64 = 0.005;

const ARRIVAL_RADIUS: f64 = 1e-6;
const MAX_BACKWARD_STEPS: usize = 20_000;
const MAX_SEEDS_PER_DOMAIN: usize = 1 << 14;

/// The eight source-to-saddle connections bounding the basin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HeteroclinicLabel {
    Eta1,
    Eta2,
    Eta3,
    Eta4,
    Eta5,
    Eta6,
    Eta7,
    Eta8,
}

impl HeteroclinicLabel {
    pub const ALL: [HeteroclinicLabel; 8] = [
        HeteroclinicLabel::Eta1,
        HeteroclinicLabel::Eta2,
        HeteroclinicLabel::Eta3,
        HeteroclinicLabel::Eta4,
        HeteroclinicLabel::Eta5,
        HeteroclinicLabel::Eta6,
        HeteroclinicLabel::Eta7,
        HeteroclinicLabel::Eta8,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> String {
        format!("eta{}", self.index())
    }

    /// `(saddle, source)` joined by this connection.
    pub fn endpoints(self) -> (PhasePoint, PhasePoint) {
        let p = PhasePoint::new;
        match self {
            HeteroclinicLabel::Eta1 => (p(PI, 0.0), p(0.0, 0.0)),
            HeteroclinicLabel::Eta2 => (p(PI, 0.0), p(TAU, 0.0)),
            HeteroclinicLabel::Eta3 => (p(TAU, PI), p(TAU, 0.0)),
            HeteroclinicLabel::Eta4 => (p(TAU, PI), p(TAU, TAU)),
            HeteroclinicLabel::Eta5 => (p(PI, TAU), p(TAU, TAU)),
            HeteroclinicLabel::Eta6 => (p(PI, TAU), p(0.0, TAU)),
            HeteroclinicLabel::Eta7 => (p(0.0, PI), p(0.0, TAU)),
            HeteroclinicLabel::Eta8 => (p(0.0, PI), p(0.0, 0.0)),
        }
    }
}

/// A traced connection, ordered from the saddle to the source. The first
/// vertex is the seed next to the saddle and the last lies within `1e-6` of
/// the source; the fixed points themselves are not included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldArc {
    pub label: HeteroclinicLabel,
    pub saddle: PhasePoint,
    pub source: PhasePoint,
    pub polyline: Vec<PhasePoint>,
}

impl ManifoldArc {
    pub fn max_segment(&self) -> f64 {
        max_segment(&self.polyline)
    }
}

fn max_segment(pts: &[PhasePoint]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max)
}

fn near_other_source(q: PhasePoint, source: PhasePoint) -> bool {
    q.torus_dist_inf(&PhasePoint::new(0.0, 0.0)) <= 1e-3 && q.dist_inf(&source) > 1e-3
}

/// Backward steps for `seed` to land within the arrival radius of `source`,
/// or `None` if it settles at a different source or runs out of budget.
fn steps_to_source(seed: PhasePoint, source: PhasePoint, params: &MapParams) -> Result<Option<usize>> {
    let mut q = seed;
    for n in 0..=MAX_BACKWARD_STEPS {
        if q.dist_inf(&source) <= ARRIVAL_RADIUS {
            return Ok(Some(n));
        }
        if near_other_source(q, source) {
            return Ok(None);
        }
        q = apply_f_inverse(q, params, DEFAULT_INVERSE_TOL)?;
    }
    Ok(None)
}

/// Trace one connection as the stable manifold of its saddle, followed
/// backwards in time until it reaches the source.
///
/// A fundamental domain of the local manifold is seeded with `m` points
/// spaced geometrically between `δ` and `δ/λ_s`; their backward orbits
/// interleave into a dense ordered sample of the arc. `m` is doubled until
/// consecutive samples are at most `step / 2` apart, then the samples are
/// thinned so that segments stay below `step`.
pub fn trace_heteroclinic(label: HeteroclinicLabel, params: &MapParams, step: f64) -> Result<ManifoldArc> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let (saddle, source) = label.endpoints();
    let jac = jacobian_f(saddle, params);
    let (eigenvalues, eigenvectors) = eigen_decomposition(&jac).expect("saddle spectrum is real");
    let (lambda_s, v) = (eigenvalues[1], eigenvectors[1]);
    debug_assert!(lambda_s.abs() < 1.0 && eigenvalues[0].abs() > 1.0);

    let toward = v[0] * (source.x - saddle.x) + v[1] * (source.y - saddle.y);
    let first = if toward >= 0.0 { 1.0 } else { -1.0 };
    let seed_at =
        |sign: f64, offset: f64| PhasePoint::new(saddle.x + sign * offset * v[0], saddle.y + sign * offset * v[1]);

    let mut chosen = None;
    let mut last_residual = f64::NAN;
    for sign in [first, -first] {
        if let Some(n) = steps_to_source(seed_at(sign, SEED_OFFSET), source, params)? {
            chosen = Some((sign, n));
            break;
        }
        last_residual = seed_at(sign, SEED_OFFSET).dist_inf(&source);
    }
    let (sign, n_steps) = chosen.ok_or(Error::NonConvergence {
        iterations: MAX_BACKWARD_STEPS,
        residual: last_residual,
    })?;

    let mut m = ((3.0 * params.a() / step).ceil() as usize).max(4);
    loop {
        let orbits: Vec<Vec<PhasePoint>> = (0..m)
            .map(|k| {
                let offset = SEED_OFFSET * lambda_s.abs().powf(-(k as f64) / m as f64);
                let mut q = seed_at(sign, offset);
                let mut orbit = Vec::with_capacity(n_steps + 1);
                orbit.push(q);
                for _ in 0..n_steps {
                    q = apply_f_inverse(q, params, DEFAULT_INVERSE_TOL)?;
                    orbit.push(q);
                }
                Ok(orbit)
            })
            .collect::<Result<_>>()?;

        let mut raw = Vec::with_capacity(m * (n_steps + 1));
        for n in 0..=n_steps {
            raw.extend(orbits.iter().map(|o| o[n]));
        }

        if max_segment(&raw) <= 0.5 * step || m >= MAX_SEEDS_PER_DOMAIN {
            let polyline = thin(&raw, 0.5 * step);
            return Ok(ManifoldArc {
                label,
                saddle,
                source,
                polyline,
            });
        }
        m *= 2;
    }
}

// Keep a vertex once it is at least `spacing` from the previously kept one;
// always keep both ends.
fn thin(raw: &[PhasePoint], spacing: f64) -> Vec<PhasePoint> {
    let mut out = vec![raw[0]];
    for &p in &raw[1..raw.len() - 1] {
        if p.dist(out.last().unwrap()) >= spacing {
            out.push(p);
        }
    }
    out.push(raw[raw.len() - 1]);
    out
}

/// All eight connections, traced in parallel.
pub fn trace_all_heteroclinics(params: &MapParams, step: f64) -> Result<Vec<ManifoldArc>> {
    HeteroclinicLabel::ALL
        .par_iter()
        .map(|&l| trace_heteroclinic(l, params, step))
        .collect()
}

/// Euclidean distance from `p` to the union of the polylines.
pub fn polyline_distance(p: PhasePoint, polylines: &[&[PhasePoint]]) -> f64 {
    let mut best = f64::INFINITY;
    for line in polylines {
        if line.len() == 1 {
            best = best.min(p.dist(&line[0]));
        }
        for w in line.windows(2) {
            // cheap reject before the projection
            let lo_x = w[0].x.min(w[1].x) - best;
            let hi_x = w[0].x.max(w[1].x) + best;
            let lo_y = w[0].y.min(w[1].y) - best;
            let hi_y = w[0].y.max(w[1].y) + best;
            if p.x < lo_x || p.x > hi_x || p.y < lo_y || p.y > hi_y {
                continue;
            }
            best = best.min(dist_to_segment(p, w[0], w[1]));
        }
    }
    best
}

/// Vertex-sampled Hausdorff distance between two unions of polylines.
pub fn hausdorff_distance(a: &[&[PhasePoint]], b: &[&[PhasePoint]]) -> f64 {
    let one_way = |from: &[&[PhasePoint]], to: &[&[PhasePoint]]| {
        from.par_iter()
            .flat_map(|line| line.par_iter())
            .map(|&p| polyline_distance(p, to))
            .reduce(|| 0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::apply_f;
    use crate::symmetry::{SymmetryId, SymmetryMap};

    fn params() -> MapParams {
        MapParams::new(0.1).unwrap()
    }

    #[test]
    fn eta1_joins_its_fixed_points() {
        let arc = trace_heteroclinic(HeteroclinicLabel::Eta1, &params(), DEFAULT_ARC_STEP).unwrap();
        assert!(arc.polyline[0].dist_inf(&PhasePoint::new(PI, 0.0)) <= 1e-6);
        assert!(arc.polyline.last().unwrap().dist_inf(&PhasePoint::new(0.0, 0.0)) <= 1e-6);
        assert!(arc.max_segment() <= DEFAULT_ARC_STEP);
        // the arc bulges below y = 0, inside A1
        assert!(arc.polyline.iter().any(|p| p.y < -0.05));
        assert!(arc.polyline.iter().all(|p| crate::geometry::a1_slack(*p) >= -1e-9));
    }

    #[test]
    fn arcs_are_forward_invariant() {
        let p = params();
        let arc = trace_heteroclinic(HeteroclinicLabel::Eta3, &p, DEFAULT_ARC_STEP).unwrap();
        let lines = [arc.polyline.as_slice()];
        for v in &arc.polyline {
            assert!(polyline_distance(apply_f(*v, &p), &lines) <= 1e-5);
        }
    }

    #[test]
    fn half_turn_maps_eta1_onto_eta5() {
        let p = params();
        let eta1 = trace_heteroclinic(HeteroclinicLabel::Eta1, &p, DEFAULT_ARC_STEP).unwrap();
        let eta5 = trace_heteroclinic(HeteroclinicLabel::Eta5, &p, DEFAULT_ARC_STEP).unwrap();
        let phi3 = SymmetryMap::of(SymmetryId::Phi3);
        let lines = [eta5.polyline.as_slice()];
        for v in &eta1.polyline {
            assert!(polyline_distance(phi3.apply(*v), &lines) <= 1e-5);
        }
    }

    #[test]
    fn rejects_non_positive_step() {
        assert!(trace_heteroclinic(HeteroclinicLabel::Eta2, &params(), 0.0).is_err());
    }

    #[test]
    fn distances_to_polylines() {
        let line = [
            PhasePoint::new(0.0, 0.0),
            PhasePoint::new(1.0, 0.0),
            PhasePoint::new(1.0, 1.0),
        ];
        let lines = [&line[..]];
        assert_eq!(polyline_distance(PhasePoint::new(0.5, 0.25), &lines), 0.25);
        assert_eq!(polyline_distance(PhasePoint::new(2.0, 0.5), &lines), 1.0);
        let shifted: Vec<_> = line.iter().map(|p| PhasePoint::new(p.x, p.y + 0.1)).collect();
        let h = hausdorff_distance(&lines, &[&shifted[..]]);
        assert!((h - 0.1).abs() < 1e-12);
    }
}
