//! Von Mises distribution on the circle: density and seeded sampling.

use std::f64::consts::TAU;

use rand::Rng;

use super::bessel::bessel_i0_scaled;
use super::RngSeed;
use crate::error::{Error, Result};
use crate::geometry::Angle;

/// Mean direction and concentration of a von Mises distribution; `kappa = 0`
/// is the circular uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    pub mu: Angle,
    pub kappa: f64,
}

impl VonMisesParams {
    pub fn new(mu: Angle, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!(
                "von Mises concentration must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(VonMisesParams { mu, kappa })
    }
}

/// Density `e^{κ cos(θ−μ)} / (2π I₀(κ))`, evaluated in scaled form so large
/// concentrations cannot overflow.
pub fn vm_density(theta: Angle, p: &VonMisesParams) -> f64 {
    let centered = (theta.radians() - p.mu.radians()).cos();
    (p.kappa * (centered - 1.0)).exp() / (TAU * bessel_i0_scaled(p.kappa))
}

/// `n` i.i.d. draws; deterministic for a given seed.
pub fn sample_vm(p: &VonMisesParams, n: usize, seed: RngSeed) -> Vec<Angle> {
    let mut rng = seed.rng();
    (0..n).map(|_| draw_vm(&mut rng, p.mu.radians(), p.kappa)).collect()
}

/// One von Mises draw by the Best–Fisher wrapped-envelope rejection scheme.
/// `mu` may be any real; the result is wrapped to `[0, 2π)`.
pub(crate) fn draw_vm<R: Rng>(rng: &mut R, mu: f64, kappa: f64) -> Angle {
    if kappa == 0.0 {
        return Angle::new(rng.gen::<f64>() * TAU);
    }
    // Best, D. J., & Fisher, N. I. (1979). Efficient simulation of the
    // von Mises distribution. Applied Statistics 28, 152-157.
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.gen();
        let z = (std::f64::consts::PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.gen();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.gen();
            let sign = if u3 > 0.5 { 1.0 } else { -1.0 };
            return Angle::new(mu + sign * f.clamp(-1.0, 1.0).acos());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::bessel::bessel_ratio;
    use approx::assert_abs_diff_eq;

    #[test]
    fn density_uniform_limit() {
        let p = VonMisesParams::new(Angle::new(1.0), 0.0).unwrap();
        for t in [0.0, 1.0, 3.0, 6.0] {
            assert_abs_diff_eq!(vm_density(Angle::new(t), &p), 1.0 / TAU, epsilon = 1e-15);
        }
    }

    #[test]
    fn density_at_mode_and_antimode() {
        // frozen from the independent Bessel series oracle: I0(1) = 1.2660658777...
        let p = VonMisesParams::new(Angle::new(0.7), 1.0).unwrap();
        let at_mode = vm_density(p.mu, &p);
        assert_abs_diff_eq!(at_mode, 0.34171048862, epsilon = 1e-9);
        let opposite = vm_density(p.mu.offset(std::f64::consts::PI), &p);
        assert_abs_diff_eq!(opposite, 0.04624548576, epsilon = 1e-9);
    }

    #[test]
    fn density_integrates_to_one() {
        for kappa in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let p = VonMisesParams::new(Angle::new(2.0), kappa).unwrap();
            let n = 4096;
            let h = TAU / n as f64;
            let mass: f64 = (0..n)
                .map(|i| vm_density(Angle::new(i as f64 * h), &p) * h)
                .sum();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampler_uniform_has_small_resultant() {
        let p = VonMisesParams::new(Angle::ZERO, 0.0).unwrap();
        let draws = sample_vm(&p, 20_000, RngSeed(42));
        let (s, c) = draws
            .iter()
            .fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
        let rbar = (s * s + c * c).sqrt() / draws.len() as f64;
        assert!(rbar < 0.02, "resultant {rbar}");
    }

    #[test]
    fn sampler_matches_bessel_ratio_moments() {
        let p = VonMisesParams::new(Angle::ZERO, 1.0).unwrap();
        let draws = sample_vm(&p, 20_000, RngSeed(7));
        let (s, c) = draws
            .iter()
            .fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
        let n = draws.len() as f64;
        let rbar = (s * s + c * c).sqrt() / n;
        let mean = s.atan2(c);
        assert!(mean.abs() < 0.05, "circular mean {mean}");
        assert!((rbar - bessel_ratio(1.0)).abs() < 0.05, "rbar {rbar}");
    }

    #[test]
    fn sampler_empty_and_deterministic() {
        let p = VonMisesParams::new(Angle::new(1.0), 2.0).unwrap();
        assert!(sample_vm(&p, 0, RngSeed(1)).is_empty());
        let a = sample_vm(&p, 100, RngSeed(9));
        let b = sample_vm(&p, 100, RngSeed(9));
        assert_eq!(a, b);
        let c = sample_vm(&p, 100, RngSeed(10));
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_concentration() {
        assert!(VonMisesParams::new(Angle::ZERO, -1.0).is_err());
        assert!(VonMisesParams::new(Angle::ZERO, f64::NAN).is_err());
    }
}
