//! Dynamics of the three-clock synchronisation map on the 2-torus and a
//! numerical certificate for its discrete Lyapunov function.
//!
//! * [`map`]: the map, its inverse and Jacobian, orbit iteration.
//! * [`symmetry`]: the four involutions and conjugacy transport.
//! * [`geometry`]: the region catalogue and the curve Γ.
//! * [`lyapunov`]: `V`, the ξ functions and the orbital derivative.
//! * [`certify`]: grid certification of `V̇ < 0` on `A1`.
//! * [`dynamics`]: fixed points, heteroclinics, basin measure, contraction rate.

pub mod certify;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod lyapunov;
pub mod map;
pub mod symmetry;

pub use certify::{certify_negative, CertReport, CertRequest, Verdict};
pub use error::{Error, Result};
pub use geometry::RegionId;
pub use map::{apply_f, apply_f_inverse, iterate, jacobian_f, Direction, MapParams, OrbitTrace, PhasePoint};
pub use symmetry::{SymmetryId, SymmetryMap};
