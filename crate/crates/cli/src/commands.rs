use clap::Args;
use serde::Serialize;

use triclock_core::certify::{DEFAULT_EPSILON, DEFAULT_INITIAL_CELL, DEFAULT_MAX_DEPTH};
use triclock_core::dynamics::{
    contraction_rate, estimate_basin, find_fixed_points, trace_all_heteroclinics, DEFAULT_ARC_STEP,
    DEFAULT_BASIN_MAX_ITER, DEFAULT_BASIN_RADIUS,
};
use triclock_core::geometry::{gamma_polyline, region_boundary};
use triclock_core::lyapunov::{orbital_derivative, v};
use triclock_core::{
    certify_negative, iterate as iterate_map, CertRequest, Direction, MapParams, PhasePoint, RegionId, Verdict,
};

use crate::config::{resolve, ConfigFile};
use crate::output::{json, record_csv, Field, Format, Table};
use crate::{CliError, Common, Outcome, EXIT_INCONCLUSIVE};

const DEFAULT_GAMMA_POINTS: usize = 201;
const DEFAULT_WINDOW: usize = 50;

fn params(common: &Common) -> Result<MapParams, CliError> {
    Ok(MapParams::new(common.a)?)
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    /// Initial x [default: 3.0]
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Initial y [default: 3.3]
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    /// Number of steps [default: 100]
    #[arg(long)]
    n: Option<usize>,
    /// Iterate the inverse map instead
    #[arg(long)]
    backward: bool,
}

pub fn iterate(common: &Common, config: &ConfigFile, args: &IterateArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let x0 = resolve(args.x0, config, "x0", 3.0)?;
    let y0 = resolve(args.y0, config, "y0", 3.3)?;
    let n = resolve(args.n, config, "n", 100)?;
    let backward = resolve(args.backward.then_some(true), config, "backward", false)?;
    let start = PhasePoint::try_new(x0, y0)?;
    let direction = if backward {
        Direction::Backward
    } else {
        Direction::Forward
    };
    let orbit = iterate_map(start, n, &p, direction)?;

    let mut table = Table::new(&["n", "x", "y", "V", "Vdot"]);
    for (i, q) in orbit.points().iter().enumerate() {
        table.push(vec![
            Field::Int(i as i64),
            Field::Float(q.x),
            Field::Float(q.y),
            Field::Float(v(*q)),
            Field::Float(orbital_derivative(*q, &p)),
        ]);
    }
    Ok(Outcome::ok(table.render(common.format)))
}

pub fn fixed_points(common: &Common) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let records = find_fixed_points(&p);
    let text = match common.format {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut table = Table::new(&[
                "x",
                "y",
                "kind",
                "hyperbolic",
                "lambda1",
                "lambda2",
                "v1x",
                "v1y",
                "v2x",
                "v2y",
                "residual",
            ]);
            for r in &records {
                table.push(vec![
                    Field::Float(r.location.x),
                    Field::Float(r.location.y),
                    Field::Text(r.kind.as_str().to_string()),
                    Field::Text(r.hyperbolic.to_string()),
                    Field::Float(r.eigenvalues[0]),
                    Field::Float(r.eigenvalues[1]),
                    Field::Float(r.eigenvectors[0][0]),
                    Field::Float(r.eigenvectors[0][1]),
                    Field::Float(r.eigenvectors[1][0]),
                    Field::Float(r.eigenvectors[1][1]),
                    Field::Float(r.residual),
                ]);
            }
            table.render(Format::Csv)
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Width of the excluded strip around the zero set and the sink [default: 0.05]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Initial grid cell size [default: 0.1]
    #[arg(long)]
    cell: Option<f64>,
    /// Maximum subdivision depth [default: 8]
    #[arg(long)]
    depth: Option<u32>,
}

pub fn verify_lyapunov(common: &Common, config: &ConfigFile, args: &VerifyArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let req = CertRequest::new(p)
        .with_epsilon(resolve(args.epsilon, config, "epsilon", DEFAULT_EPSILON)?)
        .with_initial_cell(resolve(args.cell, config, "cell", DEFAULT_INITIAL_CELL)?)
        .with_max_depth(resolve(args.depth, config, "depth", DEFAULT_MAX_DEPTH)?);
    let report = certify_negative(&req)?;
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => record_csv(&report)?,
    };
    let code = match report.verdict {
        Verdict::Certified => crate::EXIT_OK,
        _ => EXIT_INCONCLUSIVE,
    };
    Ok(Outcome { text, code })
}

fn polyline_table() -> Table {
    Table::new(&["label", "i", "x", "y"])
}

fn push_polyline(table: &mut Table, label: &str, pts: &[PhasePoint]) {
    for (i, q) in pts.iter().enumerate() {
        table.push(vec![
            Field::Text(label.to_string()),
            Field::Int(i as i64),
            Field::Float(q.x),
            Field::Float(q.y),
        ]);
    }
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// Number of intervals over 0 <= y <= pi [default: 201]
    #[arg(long)]
    points: Option<usize>,
}

pub fn gamma(common: &Common, config: &ConfigFile, args: &GammaArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let n = resolve(args.points, config, "points", DEFAULT_GAMMA_POINTS)?;
    let curve = gamma_polyline(&p, n)?;
    let mut table = polyline_table();
    push_polyline(&mut table, "gamma", &curve);
    Ok(Outcome::ok(table.render(common.format)))
}

#[derive(Debug, Args)]
pub struct HeteroclinicArgs {
    /// Upper bound on polyline segment length [default: 0.005]
    #[arg(long)]
    step: Option<f64>,
}

pub fn heteroclinics(common: &Common, config: &ConfigFile, args: &HeteroclinicArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let step = resolve(args.step, config, "step", DEFAULT_ARC_STEP)?;
    let arcs = trace_all_heteroclinics(&p, step)?;
    let mut table = polyline_table();
    for arc in &arcs {
        push_polyline(&mut table, &arc.label.name(), &arc.polyline);
    }
    Ok(Outcome::ok(table.render(common.format)))
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    /// Number of uniform samples on [0, 2pi)^2 [default: 100000]
    #[arg(long)]
    samples: Option<u64>,
    /// Iteration budget per sample [default: 10000]
    #[arg(long)]
    max_iter: Option<usize>,
    /// Radius of the convergence ball around (pi, pi) [default: 1e-6]
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Serialize)]
struct WithCoupling<T: Serialize> {
    a: f64,
    #[serde(flatten)]
    inner: T,
}

pub fn basin(common: &Common, config: &ConfigFile, args: &BasinArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let samples = resolve(args.samples, config, "samples", 100_000)?;
    let max_iter = resolve(args.max_iter, config, "max-iter", DEFAULT_BASIN_MAX_ITER)?;
    let radius = resolve(args.radius, config, "radius", DEFAULT_BASIN_RADIUS)?;
    let estimate = estimate_basin(&p, samples, max_iter, radius, common.seed)?;
    let record = WithCoupling {
        a: p.a(),
        inner: estimate,
    };
    let text = match common.format {
        Format::Json => json(&record)?,
        Format::Csv => record_csv(&record)?,
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    /// Upper bound on heteroclinic segment length [default: 0.005]
    #[arg(long)]
    step: Option<f64>,
    /// Number of intervals on the gamma curve [default: 201]
    #[arg(long)]
    points: Option<usize>,
}

/// Rows tagged `source`/`saddle`/`sink`, `eta1`..`eta8`, `gamma`, and
/// `D`/`A1`..`A4` for closed region boundaries.
pub fn portrait(common: &Common, config: &ConfigFile, args: &PortraitArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let step = resolve(args.step, config, "step", DEFAULT_ARC_STEP)?;
    let n = resolve(args.points, config, "points", DEFAULT_GAMMA_POINTS)?;

    let mut table = Table::new(&["x", "y", "kind"]);
    let mut push = |q: &PhasePoint, kind: &str| {
        table.push(vec![
            Field::Float(q.x),
            Field::Float(q.y),
            Field::Text(kind.to_string()),
        ]);
    };
    for r in find_fixed_points(&p) {
        push(&r.location, r.kind.as_str());
    }
    for arc in trace_all_heteroclinics(&p, step)? {
        let name = arc.label.name();
        arc.polyline.iter().for_each(|q| push(q, &name));
    }
    gamma_polyline(&p, n)?.iter().for_each(|q| push(q, "gamma"));
    for r in [RegionId::D, RegionId::A1, RegionId::A2, RegionId::A3, RegionId::A4] {
        if let Some(boundary) = region_boundary(r) {
            let name = format!("{r:?}");
            boundary.iter().for_each(|q| push(q, &name));
        }
    }
    Ok(Outcome::ok(table.render(common.format)))
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Initial x [default: 2.9]
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Initial y [default: 3.5]
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    /// Number of final orbit steps in the fit [default: 50]
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Serialize)]
struct RateRecord {
    x0: f64,
    y0: f64,
    #[serde(flatten)]
    fit: triclock_core::dynamics::ContractionFit,
}

pub fn rate(common: &Common, config: &ConfigFile, args: &RateArgs) -> Result<Outcome, CliError> {
    let p = params(common)?;
    let x0 = resolve(args.x0, config, "x0", 2.9)?;
    let y0 = resolve(args.y0, config, "y0", 3.5)?;
    let window = resolve(args.window, config, "window", DEFAULT_WINDOW)?;
    let fit = contraction_rate(&p, PhasePoint::try_new(x0, y0)?, window)?;
    let record = WithCoupling {
        a: p.a(),
        inner: RateRecord { x0, y0, fit },
    };
    let text = match common.format {
        Format::Json => json(&record)?,
        Format::Csv => record_csv(&record)?,
    };
    Ok(Outcome::ok(text))
}
