use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{apply_f, MapParams, PhasePoint};

/// Orbits are followed until they are this close to the sink.
const DISTANCE_FLOOR: f64 = 1e-10;
const ESCAPE_DISTANCE: f64 = 100.0;
const MAX_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionFit {
    /// `exp(slope)` of the least-squares fit of `ln |p_n - (π,π)|` against `n`.
    pub rate: f64,
    pub slope: f64,
    pub window: usize,
    /// Index of the last orbit point used in the fit.
    pub last_step: usize,
}

/// Per-step contraction factor near the sink, fitted over the final
/// `window` steps of the orbit of `p0`.
pub fn contraction_rate(params: &MapParams, p0: PhasePoint, window: usize) -> Result<ContractionFit> {
    p0.ensure_finite()?;
    if window < 2 {
        return Err(Error::InvalidArgument(format!("window must be >= 2, got {window}")));
    }
    if p0 == PhasePoint::SINK {
        return Err(Error::DegenerateOrbit);
    }
    let mut logs = Vec::new();
    let mut p = p0;
    loop {
        let d = p.dist(&PhasePoint::SINK);
        if d == 0.0 {
            // landed exactly on the sink in finite time
            break;
        }
        if d.is_nan() || d >= ESCAPE_DISTANCE || logs.len() > MAX_STEPS {
            return Err(Error::NotConverging { x: p0.x, y: p0.y });
        }
        logs.push(d.ln());
        if d < DISTANCE_FLOOR {
            break;
        }
        p = apply_f(p, params);
    }
    if logs.len() < window {
        return Err(Error::DegenerateOrbit);
    }
    let tail = &logs[logs.len() - window..];
    let n = window as f64;
    let mean_t = (n - 1.0) / 2.0;
    let mean_l = tail.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, l) in tail.iter().enumerate() {
        let t = i as f64 - mean_t;
        sxy += t * (l - mean_l);
        sxx += t * t;
    }
    let slope = sxy / sxx;
    Ok(ContractionFit {
        rate: slope.exp(),
        slope,
        window,
        last_step: logs.len() - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn params() -> MapParams {
        MapParams::new(0.1).unwrap()
    }

    #[test]
    fn generic_orbit_contracts_at_dominant_rate() {
        let fit = contraction_rate(&params(), PhasePoint::new(2.9, 3.5), 50).unwrap();
        assert!((fit.rate - 0.9).abs() < 0.01, "{fit:?}");
    }

    #[test]
    fn invariant_lines_contract_at_their_own_rates() {
        let p = params();
        // y = x: x ↦ x + 3a sin x, derivative 1 - 3a at π
        let fit = contraction_rate(&p, PhasePoint::new(2.5, 2.5), 50).unwrap();
        assert!((fit.rate - 0.7).abs() < 0.01, "{fit:?}");
        // y = 2π - x: x ↦ x + a sin x, derivative 1 - a at π
        let fit = contraction_rate(&p, PhasePoint::new(2.5, TAU - 2.5), 50).unwrap();
        assert!((fit.rate - 0.9).abs() < 0.01, "{fit:?}");
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let p = params();
        assert_eq!(contraction_rate(&p, PhasePoint::SINK, 10), Err(Error::DegenerateOrbit));
        assert!(contraction_rate(&p, PhasePoint::new(2.0, 2.0), 1).is_err());
        // a source never moves, so the orbit never gets close
        assert!(matches!(
            contraction_rate(&p, PhasePoint::new(0.0, 0.0), 10),
            Err(Error::NotConverging { .. })
        ));
    }
}
