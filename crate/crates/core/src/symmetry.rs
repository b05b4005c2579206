//! The four involutions commuting with the map.
//!
//! Each symmetry is an affine map `p ↦ M p + 2π k` with `M` a signed
//! permutation matrix and `k ∈ {0,1}²`. The group is fixed:
//!
//! | id   | action                 | geometry                              |
//! |------|------------------------|---------------------------------------|
//! | Φ1   | `(x, y)`               | identity                              |
//! | Φ2   | `(2π - y, 2π - x)`     | reflection in `y = 2π - x`            |
//! | Φ3   | `(2π - x, 2π - y)`     | half-turn about `(π, π)`              |
//! | Φ4   | `(y, x)`               | reflection in `y = x`                 |

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::map::{apply_f, MapParams, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymmetryId {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
}

impl SymmetryId {
    pub const ALL: [SymmetryId; 4] = [SymmetryId::Phi1, SymmetryId::Phi2, SymmetryId::Phi3, SymmetryId::Phi4];

    /// 1-based index, matching the sector and region numbering.
    pub fn index(self) -> usize {
        match self {
            SymmetryId::Phi1 => 1,
            SymmetryId::Phi2 => 2,
            SymmetryId::Phi3 => 3,
            SymmetryId::Phi4 => 4,
        }
    }
}

/// Integer-coefficient affine action of one group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryMap {
    id: SymmetryId,
    /// Row-major signed permutation matrix.
    matrix: [[i8; 2]; 2],
    /// Offset in units of 2π.
    offset: [i8; 2],
}

impl SymmetryMap {
    pub const fn of(id: SymmetryId) -> Self {
        let (matrix, offset) = match id {
            SymmetryId::Phi1 => ([[1, 0], [0, 1]], [0, 0]),
            SymmetryId::Phi2 => ([[0, -1], [-1, 0]], [1, 1]),
            SymmetryId::Phi3 => ([[-1, 0], [0, -1]], [1, 1]),
            SymmetryId::Phi4 => ([[0, 1], [1, 0]], [0, 0]),
        };
        Self { id, matrix, offset }
    }

    pub fn all() -> [SymmetryMap; 4] {
        SymmetryId::ALL.map(SymmetryMap::of)
    }

    pub fn id(&self) -> SymmetryId {
        self.id
    }

    pub fn matrix(&self) -> [[i8; 2]; 2] {
        self.matrix
    }

    pub fn offset(&self) -> [i8; 2] {
        self.offset
    }

    #[inline]
    pub fn apply(&self, p: PhasePoint) -> PhasePoint {
        let row = |r: usize| {
            let lin = signed(self.matrix[r][0], p.x) + signed(self.matrix[r][1], p.y);
            if self.offset[r] == 0 {
                lin
            } else {
                f64::from(self.offset[r]) * TAU + lin
            }
        };
        PhasePoint::new(row(0), row(1))
    }

    /// Every group element is its own inverse.
    #[inline]
    pub fn inverse(&self) -> SymmetryMap {
        *self
    }
}

// Exact product with a coefficient in {-1, 0, 1}.
#[inline]
fn signed(coef: i8, v: f64) -> f64 {
    match coef {
        0 => 0.0,
        1 => v,
        -1 => -v,
        c => f64::from(c) * v,
    }
}

pub fn apply_symmetry(s: &SymmetryMap, p: PhasePoint) -> PhasePoint {
    s.apply(p)
}

/// Largest ∞-norm residual `|F(Φ p) - Φ F(p)|` over `samples` seeded uniform
/// points of `[0, 2π)²`.
pub fn check_equivariance(s: &SymmetryMap, params: &MapParams, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples.max(1))
        .map(|_| {
            let p = PhasePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let lhs = apply_f(s.apply(p), params);
            let rhs = s.apply(apply_f(p, params));
            lhs.dist_inf(&rhs)
        })
        .fold(0.0, f64::max)
}

/// Pull a scalar field back through a conjugacy: `p ↦ V(h⁻¹(p))`.
pub fn transport_lyapunov<V>(v: V, h: SymmetryMap) -> impl Fn(PhasePoint) -> f64
where
    V: Fn(PhasePoint) -> f64,
{
    let inv = h.inverse();
    move |p| v(inv.apply(p))
}
