//! Wrapped Cauchy distribution on the circle.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::RngSeed;
use crate::error::{Error, Result};
use crate::geometry::Angle;

/// Mean direction and concentration `ζ ∈ [0, 1)`; `ζ = 0` is the circular
/// uniform and the mean resultant length equals `ζ` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrappedCauchyParams {
    pub mu: Angle,
    pub zeta: f64,
}

impl WrappedCauchyParams {
    pub fn new(mu: Angle, zeta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::Domain(format!(
                "wrapped Cauchy concentration must lie in [0, 1), got {zeta}"
            )));
        }
        Ok(WrappedCauchyParams { mu, zeta })
    }
}

/// Density `(1/2π) (1 − ζ²) / (1 + ζ² − 2ζ cos(θ − μ))`.
pub fn wc_density(theta: Angle, p: &WrappedCauchyParams) -> f64 {
    let z = p.zeta;
    let c = (theta.radians() - p.mu.radians()).cos();
    (1.0 - z * z) / (TAU * (1.0 + z * z - 2.0 * z * c))
}

/// `n` i.i.d. draws obtained by wrapping a linear Cauchy with location `μ` and
/// scale `−ln ζ`; uniform when `ζ = 0`. Deterministic for a given seed.
pub fn sample_wc(p: &WrappedCauchyParams, n: usize, seed: RngSeed) -> Vec<Angle> {
    let mut rng = seed.rng();
    if p.zeta == 0.0 {
        return (0..n).map(|_| Angle::new(rng.gen::<f64>() * TAU)).collect();
    }
    let scale = -p.zeta.ln();
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            Angle::new(p.mu.radians() + scale * (PI * (u - 0.5)).tan())
        })
        .collect()
}
