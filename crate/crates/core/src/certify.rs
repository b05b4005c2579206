//! Grid certification that the orbital derivative is strictly negative on
//! `A1` away from its zero set.
//!
//! `A1` is covered by square cells of side `h₀`. A cell is
//!
//! * dropped when it misses `A1`,
//! * excluded when it lies inside the ∞-norm `ε`-neighbourhood of the zero
//!   set (the four lower edges of `A1` and the sink),
//! * split along `x = π - 3a` and `x = π` when it straddles either line, so
//!   each piece sees a fixed set of closed forms (left of the strip only `AL`
//!   applies, inside it `AL` or `AM`, right of `x = π` only `AR`),
//! * certified when, for every closed form that may apply, the value at the
//!   centre plus the per-axis Lipschitz slack is negative,
//! * otherwise quartered, down to `max_depth` levels.
//!
//! The verdict is `Certified` iff no cell was left over at the bottom level.
//! Bounds are plain floating point; there is no outward rounding.
//!
//! Top-level cells are independent. They are evaluated in parallel and the
//! partial tallies are merged in grid order, so the report does not depend
//! on the number of worker threads.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{a1_convex_pieces, a1_lower_edges, dist_inf_to_segment, sample_region, RegionId};
use crate::lyapunov::{closed_form, v};
use crate::map::{MapParams, PhasePoint};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_INITIAL_CELL: f64 = 0.1;
pub const DEFAULT_MAX_DEPTH: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertRequest {
    pub region: RegionId,
    pub params: MapParams,
    /// ∞-norm radius of the excluded neighbourhood of the zero set.
    pub epsilon: f64,
    pub initial_cell: f64,
    pub max_depth: u32,
}

impl CertRequest {
    pub fn new(params: MapParams) -> Self {
        Self {
            region: RegionId::A1,
            params,
            epsilon: DEFAULT_EPSILON,
            initial_cell: DEFAULT_INITIAL_CELL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_initial_cell(mut self, h0: f64) -> Self {
        self.initial_cell = h0;
        self
    }

    pub fn with_max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.region != RegionId::A1 {
            return Err(Error::UnsupportedRegion(self.region));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.initial_cell > 0.0 && self.initial_cell.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "initial cell must be > 0, got {}",
                self.initial_cell
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidArgument("max depth must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

/// An axis-aligned cell with the upper bound computed for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub depth: u32,
    pub bound: f64,
}

impl Cell {
    pub fn contains(&self, p: PhasePoint) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzConstants {
    pub al: f64,
    pub am: f64,
    pub ar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub verdict: Verdict,
    pub a: f64,
    pub epsilon: f64,
    pub initial_cell: f64,
    pub max_depth: u32,
    pub cells_examined: u64,
    pub cells_certified: u64,
    pub cells_subdivided: u64,
    pub cells_excluded: u64,
    pub cells_outside: u64,
    pub cells_split: u64,
    pub cells_failed: u64,
    /// Largest certified upper bound; `None` if nothing was certified.
    pub worst_bound: Option<f64>,
    pub lipschitz: LipschitzConstants,
    /// Bottom-level cells that could not be certified.
    pub offending_cells: Vec<Cell>,
    #[serde(skip)]
    pub certified_cells: Vec<Cell>,
}

/// Per-axis sup-norms of the gradient of a closed form.
fn axis_lipschitz(region: RegionId, a: f64) -> Result<(f64, f64)> {
    match region {
        RegionId::AL => Ok((3.0 * a, 3.0 * a)),
        RegionId::AM => Ok((2.0 + a, a)),
        RegionId::AR => Ok((a, a)),
        other => Err(Error::UnsupportedRegion(other)),
    }
}

/// ∞-norm Lipschitz constant of the closed form on a piece of `A1`.
pub fn lipschitz_bound(region: RegionId, params: &MapParams) -> Result<f64> {
    let (lx, ly) = axis_lipschitz(region, params.a())?;
    Ok(lx + ly)
}

#[derive(Debug, Default)]
struct Tally {
    examined: u64,
    certified: u64,
    subdivided: u64,
    excluded: u64,
    outside: u64,
    split: u64,
    failed: u64,
    worst: Option<f64>,
    offending: Vec<Cell>,
    certified_cells: Vec<Cell>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.examined += other.examined;
        self.certified += other.certified;
        self.subdivided += other.subdivided;
        self.excluded += other.excluded;
        self.outside += other.outside;
        self.split += other.split;
        self.failed += other.failed;
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.offending.extend(other.offending);
        self.certified_cells.extend(other.certified_cells);
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn corners(&self) -> [PhasePoint; 4] {
        [
            PhasePoint::new(self.x0, self.y0),
            PhasePoint::new(self.x1, self.y0),
            PhasePoint::new(self.x1, self.y1),
            PhasePoint::new(self.x0, self.y1),
        ]
    }

    fn center(&self) -> PhasePoint {
        PhasePoint::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn half_widths(&self) -> (f64, f64) {
        (0.5 * (self.x1 - self.x0), 0.5 * (self.y1 - self.y0))
    }

    fn quarters(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect {
                x0: self.x0,
                x1: c.x,
                y0: self.y0,
                y1: c.y,
            },
            Rect {
                x0: c.x,
                x1: self.x1,
                y0: self.y0,
                y1: c.y,
            },
            Rect {
                x0: self.x0,
                x1: c.x,
                y0: c.y,
                y1: self.y1,
            },
            Rect {
                x0: c.x,
                x1: self.x1,
                y0: c.y,
                y1: self.y1,
            },
        ]
    }

    fn into_cell(self, depth: u32, bound: f64) -> Cell {
        Cell {
            x0: self.x0,
            x1: self.x1,
            y0: self.y0,
            y1: self.y1,
            depth,
            bound,
        }
    }
}

/// Separating-axis test between a rectangle and a convex polygon.
fn rect_meets_convex(r: &Rect, poly: &[PhasePoint]) -> bool {
    let (px0, px1) = poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.x), hi.max(p.x))
    });
    let (py0, py1) = poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.y), hi.max(p.y))
    });
    if r.x1 < px0 || r.x0 > px1 || r.y1 < py0 || r.y0 > py1 {
        return false;
    }
    let corners = r.corners();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let n = (b.y - a.y, a.x - b.x);
        let proj = |p: &PhasePoint| n.0 * p.x + n.1 * p.y;
        let (plo, phi) = poly
            .iter()
            .map(proj)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        let (rlo, rhi) = corners
            .iter()
            .map(proj)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        if rhi < plo || rlo > phi {
            return false;
        }
    }
    true
}

struct Certifier {
    params: MapParams,
    epsilon: f64,
    max_depth: u32,
    pieces: [[PhasePoint; 4]; 2],
    edges: [(PhasePoint, PhasePoint); 4],
    strip_left: f64,
}

impl Certifier {
    fn new(req: &CertRequest) -> Self {
        Self {
            params: req.params,
            epsilon: req.epsilon,
            max_depth: req.max_depth,
            pieces: a1_convex_pieces(),
            edges: a1_lower_edges(),
            strip_left: PI - 3.0 * req.params.a(),
        }
    }

    fn meets_a1(&self, r: &Rect) -> bool {
        self.pieces.iter().any(|poly| rect_meets_convex(r, poly))
    }

    /// The ε-neighbourhood of a segment is convex, so a rectangle lies inside
    /// it iff all four corners do.
    fn inside_exclusion(&self, r: &Rect) -> bool {
        let corners = r.corners();
        let eps = self.epsilon;
        corners.iter().all(|c| c.dist_inf(&PhasePoint::SINK) <= eps)
            || self
                .edges
                .iter()
                .any(|&(a, b)| corners.iter().all(|c| dist_inf_to_segment(*c, a, b) <= eps))
    }

    fn applicable_forms(&self, r: &Rect) -> &'static [RegionId] {
        if r.x0 >= PI {
            &[RegionId::AR]
        } else if r.x1 <= self.strip_left || r.y1 <= 0.0 {
            &[RegionId::AL]
        } else {
            &[RegionId::AL, RegionId::AM]
        }
    }

    fn upper_bound(&self, r: &Rect) -> f64 {
        let c = r.center();
        let (hx, hy) = r.half_widths();
        let a = self.params.a();
        self.applicable_forms(r)
            .iter()
            .map(|&form| {
                let (lx, ly) = axis_lipschitz(form, a).expect("closed-form region");
                closed_form(form, c, &self.params).expect("closed-form region") + lx * hx + ly * hy
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn process(&self, r: Rect, depth: u32, out: &mut Tally) {
        out.examined += 1;
        if !self.meets_a1(&r) {
            out.outside += 1;
            return;
        }
        if self.inside_exclusion(&r) {
            out.excluded += 1;
            return;
        }
        for cut in [self.strip_left, PI] {
            if r.x0 < cut && cut < r.x1 {
                out.split += 1;
                self.process(Rect { x1: cut, ..r }, depth, out);
                self.process(Rect { x0: cut, ..r }, depth, out);
                return;
            }
        }
        let bound = self.upper_bound(&r);
        if bound < 0.0 {
            out.certified += 1;
            out.worst = Some(out.worst.map_or(bound, |w| w.max(bound)));
            out.certified_cells.push(r.into_cell(depth, bound));
        } else if depth < self.max_depth {
            out.subdivided += 1;
            for q in r.quarters() {
                self.process(q, depth + 1, out);
            }
        } else {
            out.failed += 1;
            out.offending.push(r.into_cell(depth, bound));
        }
    }
}

/// Run the certification. Parallel over top-level cells on the current
/// rayon pool.
pub fn certify_negative(req: &CertRequest) -> Result<CertReport> {
    req.validate()?;
    let certifier = Certifier::new(req);
    let h = req.initial_cell;
    let (x_lo, y_lo) = (0.0, -FRAC_PI_2);
    let nx = (TAU / h).ceil() as usize;
    let ny = ((PI + FRAC_PI_2) / h).ceil() as usize;

    let partials: Vec<Tally> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let r = Rect {
                x0: x_lo + i as f64 * h,
                x1: x_lo + (i + 1) as f64 * h,
                y0: y_lo + j as f64 * h,
                y1: y_lo + (j + 1) as f64 * h,
            };
            let mut t = Tally::default();
            certifier.process(r, 0, &mut t);
            t
        })
        .collect();
    let tally = partials.into_iter().fold(Tally::default(), Tally::merge);

    let a = req.params.a();
    Ok(CertReport {
        verdict: if tally.failed == 0 {
            Verdict::Certified
        } else {
            Verdict::Inconclusive
        },
        a,
        epsilon: req.epsilon,
        initial_cell: req.initial_cell,
        max_depth: req.max_depth,
        cells_examined: tally.examined,
        cells_certified: tally.certified,
        cells_subdivided: tally.subdivided,
        cells_excluded: tally.excluded,
        cells_outside: tally.outside,
        cells_split: tally.split,
        cells_failed: tally.failed,
        worst_bound: tally.worst,
        lipschitz: LipschitzConstants {
            al: lipschitz_bound(RegionId::AL, &req.params)?,
            am: lipschitz_bound(RegionId::AM, &req.params)?,
            ar: lipschitz_bound(RegionId::AR, &req.params)?,
        },
        offending_cells: tally.offending,
        certified_cells: tally.certified_cells,
    })
}

/// Check `V(H) = 0` and `V > 0` at seeded samples of `region` away from `H`.
pub fn positivity_check_v(
    region: RegionId,
    h: PhasePoint,
    samples: usize,
    params: &MapParams,
    seed: u64,
) -> Result<bool> {
    if h != PhasePoint::SINK {
        return Err(Error::InvalidArgument(format!(
            "positivity is checked at the sink only, got {h:?}"
        )));
    }
    if v(h) != 0.0 {
        return Ok(false);
    }
    let pts = sample_region(region, params, samples, seed);
    Ok(pts.iter().filter(|p| p.dist_inf(&h) > 1e-9).all(|p| v(*p) > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::orbital_derivative;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(a: f64) -> MapParams {
        MapParams::new(a).unwrap()
    }

    // Largest central-difference slope of a closed form over a fine grid,
    // summed over the two axes.
    fn fd_lipschitz(region: RegionId, p: &MapParams) -> f64 {
        let h = 1e-6;
        let (mut gx, mut gy) = (0.0f64, 0.0f64);
        for i in 0..=400 {
            for j in 0..=400 {
                let q = PhasePoint::new(TAU * i as f64 / 400.0, -FRAC_PI_2 + 1.5 * PI * j as f64 / 400.0);
                let f = |dx: f64, dy: f64| closed_form(region, PhasePoint::new(q.x + dx, q.y + dy), p).unwrap();
                gx = gx.max(((f(h, 0.0) - f(-h, 0.0)) / (2.0 * h)).abs());
                gy = gy.max(((f(0.0, h) - f(0.0, -h)) / (2.0 * h)).abs());
            }
        }
        gx + gy
    }

    #[test]
    fn lipschitz_constants() {
        let p = params(0.1);
        assert!((lipschitz_bound(RegionId::AL, &p).unwrap() - 0.6).abs() < 1e-15);
        assert!((lipschitz_bound(RegionId::AR, &p).unwrap() - 0.2).abs() < 1e-15);
        assert!((lipschitz_bound(RegionId::AM, &p).unwrap() - 2.2).abs() < 1e-15);
        for r in [RegionId::AL, RegionId::AM, RegionId::AR] {
            let fd = fd_lipschitz(r, &p);
            let l = lipschitz_bound(r, &p).unwrap();
            assert!(fd <= l + 1e-6 && fd >= l - 1e-3, "{r:?}: fd {fd}, bound {l}");
        }
        assert!(matches!(
            lipschitz_bound(RegionId::A1, &p),
            Err(Error::UnsupportedRegion(_))
        ));
    }

    #[test]
    fn certifies_at_default_resolution() {
        let report = certify_negative(&CertRequest::new(params(0.1))).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        assert_eq!(report.cells_failed, 0);
        assert!(report.offending_cells.is_empty());
        let worst = report.worst_bound.unwrap();
        assert!(worst < 0.0);
        assert_eq!(report.certified_cells.len() as u64, report.cells_certified);
        assert_eq!(
            report.cells_examined,
            report.cells_certified
                + report.cells_subdivided
                + report.cells_excluded
                + report.cells_outside
                + report.cells_split
                + report.cells_failed
        );
    }

    #[test]
    fn zero_epsilon_is_inconclusive() {
        let req = CertRequest::new(params(0.1)).with_epsilon(0.0).with_max_depth(3);
        let report = certify_negative(&req).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(!report.offending_cells.is_empty());
        assert!(report.offending_cells.iter().all(|c| c.bound >= 0.0 && c.depth == 3));
    }

    #[test]
    fn rejects_bad_requests() {
        let p = params(0.1);
        let bad = |req: CertRequest| certify_negative(&req).is_err();
        assert!(bad(CertRequest::new(p).with_epsilon(-1.0)));
        assert!(bad(CertRequest::new(p).with_initial_cell(0.0)));
        assert!(bad(CertRequest::new(p).with_max_depth(0)));
        assert!(bad(CertRequest {
            region: RegionId::S1,
            ..CertRequest::new(p)
        }));
    }

    #[test]
    fn certified_cells_are_sound_under_sampling() {
        let p = params(0.1);
        let report = certify_negative(&CertRequest::new(p)).unwrap();
        let worst = report.worst_bound.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let cells = &report.certified_cells;
        for _ in 0..100 {
            let cell = cells[rng.random_range(0..cells.len())];
            for _ in 0..1000 {
                let q = PhasePoint::new(rng.random_range(cell.x0..=cell.x1), rng.random_range(cell.y0..=cell.y1));
                if crate::geometry::a1_slack(q) < 0.0 {
                    continue;
                }
                let vdot = orbital_derivative(q, &p);
                assert!(vdot < 0.0, "non-negative V̇ {vdot} at {q:?} in {cell:?}");
                assert!(vdot <= cell.bound + 1e-12);
                assert!(vdot <= worst + 1e-12);
            }
        }
    }

    #[test]
    fn report_is_independent_of_worker_count() {
        let req = CertRequest::new(params(0.12)).with_max_depth(6);
        let run = |n: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| certify_negative(&req).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(3));
    }

    #[test]
    fn finer_grids_and_wider_exclusions_stay_certified() {
        let p = params(0.1);
        let base = CertRequest::new(p);
        assert_eq!(certify_negative(&base).unwrap().verdict, Verdict::Certified);
        assert_eq!(
            certify_negative(&base.with_initial_cell(0.05)).unwrap().verdict,
            Verdict::Certified
        );
        assert_eq!(
            certify_negative(&base.with_epsilon(0.1)).unwrap().verdict,
            Verdict::Certified
        );
        assert_eq!(
            certify_negative(&base.with_max_depth(9)).unwrap().verdict,
            Verdict::Certified
        );
    }

    #[test]
    fn positivity_of_v() {
        let p = params(0.1);
        assert!(positivity_check_v(RegionId::A1, PhasePoint::SINK, 100_000, &p, 1).unwrap());
        assert!(positivity_check_v(RegionId::S1, PhasePoint::SINK, 2_000, &p, 2).unwrap());
        assert!(positivity_check_v(RegionId::A1, PhasePoint::new(0.0, 0.0), 10, &p, 1).is_err());
        assert_eq!(v(PhasePoint::SINK), 0.0);
    }
}
