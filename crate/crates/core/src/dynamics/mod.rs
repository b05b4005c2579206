//! Global phase portrait: fixed points, the heteroclinic network Θ, the
//! basin of the sink and the rate at which orbits reach it.

mod basin;
mod fixed_points;
mod heteroclinic;
mod rate;

pub use basin::{basin_fraction_of, estimate_basin, BasinEstimate, DEFAULT_BASIN_MAX_ITER, DEFAULT_BASIN_RADIUS};
pub use fixed_points::{classify, eigen_decomposition, find_fixed_points, FixedPointKind, FixedPointRecord};
pub use heteroclinic::{
    hausdorff_distance, polyline_distance, trace_all_heteroclinics, trace_heteroclinic, HeteroclinicLabel, ManifoldArc,
    DEFAULT_ARC_STEP, SEED_OFFSET,
};
pub use rate::{contraction_rate, ContractionFit};
