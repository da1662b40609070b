//! Residual diagnostics: circular summary statistics, von Mises
//! goodness-of-fit (Watson's U²), and QQ data extraction.

use std::f64::consts::TAU;

use crate::distributions::{bessel_ratio, vm_density, VonMisesParams};
use crate::error::{Error, Result};
use crate::geometry::Angle;

/// Largest concentration the von Mises MLE will report; beyond this the
/// sample is effectively degenerate.
pub const KAPPA_CAP: f64 = 1e4;

/// First-order circular statistics of a sample of angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularSummary {
    /// `None` when the resultant vanishes and no direction is defined.
    pub mean_direction: Option<Angle>,
    pub resultant_length: f64,
    /// `sqrt(-2 ln R̄)`; infinite for a vanishing resultant.
    pub circular_sd: f64,
    pub n: usize,
}

pub fn circular_summary(angles: &[Angle]) -> Result<CircularSummary> {
    if angles.is_empty() {
        return Err(Error::Precondition(
            "circular summary needs at least one angle".into(),
        ));
    }
    let n = angles.len() as f64;
    let s: f64 = angles.iter().map(|a| a.sin()).sum();
    let c: f64 = angles.iter().map(|a| a.cos()).sum();
    let rbar = (s * s + c * c).sqrt() / n;
    let mean_direction = if rbar < 1e-12 {
        None
    } else {
        Some(Angle::new(s.atan2(c)))
    };
    let circular_sd = if rbar <= 0.0 {
        f64::INFINITY
    } else {
        (-2.0 * rbar.ln()).max(0.0).sqrt()
    };
    Ok(CircularSummary {
        mean_direction,
        resultant_length: rbar,
        circular_sd,
        n: angles.len(),
    })
}

/// Why a von Mises fit is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmFitFlag {
    /// Resultant length zero: direction undefined, concentration forced to 0.
    ZeroResultant,
    /// Resultant length at (or numerically above) 1: concentration clamped
    /// at [`KAPPA_CAP`].
    KappaCapped,
}

/// Maximum-likelihood von Mises parameters of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmFit {
    pub mu_hat: Angle,
    pub kappa_hat: f64,
    pub flag: Option<VmFitFlag>,
}

/// Fits `(μ̂, κ̂)`: the mean direction, and the concentration solving
/// `I₁(κ)/I₀(κ) = R̄` by safeguarded Newton iteration from the standard
/// small/large-resultant initializer.
pub fn vm_mle(angles: &[Angle]) -> Result<VmFit> {
    if angles.len() < 2 {
        return Err(Error::Precondition(format!(
            "von Mises fit needs n >= 2, got {}",
            angles.len()
        )));
    }
    let summary = circular_summary(angles)?;
    let rbar = summary.resultant_length;
    let Some(mu_hat) = summary.mean_direction else {
        return Ok(VmFit {
            mu_hat: Angle::ZERO,
            kappa_hat: 0.0,
            flag: Some(VmFitFlag::ZeroResultant),
        });
    };
    let (kappa_hat, flag) = invert_bessel_ratio(rbar);
    Ok(VmFit {
        mu_hat,
        kappa_hat,
        flag,
    })
}

fn kappa_initializer(rbar: f64) -> f64 {
    if rbar < 0.53 {
        2.0 * rbar + rbar.powi(3) + 5.0 * rbar.powi(5) / 6.0
    } else if rbar < 0.85 {
        -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar)
    } else {
        1.0 / (rbar.powi(3) - 4.0 * rbar * rbar + 3.0 * rbar)
    }
}

fn invert_bessel_ratio(rbar: f64) -> (f64, Option<VmFitFlag>) {
    if rbar <= 0.0 {
        return (0.0, Some(VmFitFlag::ZeroResultant));
    }
    if bessel_ratio(KAPPA_CAP) <= rbar {
        return (KAPPA_CAP, Some(VmFitFlag::KappaCapped));
    }
    let mut kappa = kappa_initializer(rbar).clamp(1e-8, KAPPA_CAP);
    let (mut lo, mut hi) = (0.0, KAPPA_CAP);
    for _ in 0..60 {
        let a = bessel_ratio(kappa);
        let resid = a - rbar;
        if resid.abs() < 1e-12 {
            break;
        }
        if resid > 0.0 {
            hi = kappa;
        } else {
            lo = kappa;
        }
        // A'(k) = 1 - A/k - A^2
        let deriv = 1.0 - a / kappa - a * a;
        let newton = kappa - resid / deriv;
        kappa = if deriv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    (kappa, None)
}

/// Von Mises CDF anchored at 0: `∫₀^θ f_vm(t; μ, κ) dt` by adaptive Simpson
/// quadrature, split at the mode so sharp densities are never overlooked.
pub fn vm_cdf(theta: Angle, mu: Angle, kappa: f64) -> f64 {
    debug_assert!(kappa >= 0.0);
    if kappa == 0.0 {
        return theta.radians() / TAU;
    }
    let p = VonMisesParams { mu, kappa };
    let f = |t: f64| vm_density(Angle::new(t), &p);
    let upper = theta.radians();
    let mut breaks = vec![0.0];
    let mode = mu.radians();
    if mode > 0.0 && mode < upper {
        breaks.push(mode);
    }
    breaks.push(upper);
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        total += adaptive_simpson(&f, pair[0], pair[1], 1e-12);
    }
    total.clamp(0.0, 1.0)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Watson's U² test of the von Mises hypothesis with both parameters
/// estimated from the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WatsonResult {
    pub statistic: f64,
    pub critical_value_5pct: f64,
    pub reject: bool,
    pub kappa_hat: f64,
    pub mu_hat: Angle,
}

// Asymptotic 5% points of U² for the case with both parameters estimated,
// indexed by the estimated concentration (Lockhart & Stephens 1985,
// Biometrika 72). The final row stands in for κ → ∞.
const WATSON_KAPPA_GRID: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 4.0, 100.0];
const WATSON_CRIT_5PCT: [f64; 7] = [0.061, 0.066, 0.079, 0.092, 0.101, 0.113, 0.117];

pub(crate) fn watson_critical_value_5pct(kappa_hat: f64) -> f64 {
    let grid = &WATSON_KAPPA_GRID;
    let crit = &WATSON_CRIT_5PCT;
    if kappa_hat <= grid[0] {
        return crit[0];
    }
    if kappa_hat >= grid[grid.len() - 1] {
        return crit[crit.len() - 1];
    }
    let idx = grid.iter().position(|&g| g > kappa_hat).unwrap();
    let (g0, g1) = (grid[idx - 1], grid[idx]);
    let t = (kappa_hat - g0) / (g1 - g0);
    crit[idx - 1] + t * (crit[idx] - crit[idx - 1])
}

/// Runs Watson's U² test: estimates `(μ̂, κ̂)`, transforms the sample through
/// the fitted CDF, and compares
/// `U² = Σᵢ (u₍ᵢ₎ − (2i−1)/(2n))² + 1/(12n) − n (ū − ½)²`
/// against the 5% critical value interpolated at `κ̂`.
pub fn watson_u2(angles: &[Angle]) -> Result<WatsonResult> {
    if angles.len() < 10 {
        return Err(Error::Precondition(format!(
            "Watson's test needs n >= 10, got {}",
            angles.len()
        )));
    }
    let fit = vm_mle(angles)?;
    let mut u: Vec<f64> = angles
        .iter()
        .map(|&a| vm_cdf(a, fit.mu_hat, fit.kappa_hat))
        .collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = u.len() as f64;
    let ubar = u.iter().sum::<f64>() / n;
    let mut stat = 1.0 / (12.0 * n) - n * (ubar - 0.5) * (ubar - 0.5);
    for (i, ui) in u.iter().enumerate() {
        let target = (2.0 * (i + 1) as f64 - 1.0) / (2.0 * n);
        stat += (ui - target) * (ui - target);
    }
    let critical_value_5pct = watson_critical_value_5pct(fit.kappa_hat);
    Ok(WatsonResult {
        statistic: stat,
        critical_value_5pct,
        reject: stat > critical_value_5pct,
        kappa_hat: fit.kappa_hat,
        mu_hat: fit.mu_hat,
    })
}

/// Rank-pairs two samples for a QQ plot: each list is sorted ascending on its
/// canonical `[0, 2π)` representative and paired by rank.
pub fn qq_pairs(observed: &[Angle], predicted: &[Angle]) -> Result<Vec<(f64, f64)>> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::Precondition("QQ pairing needs n >= 1".into()));
    }
    let mut obs: Vec<f64> = observed.iter().map(|a| a.radians()).collect();
    let mut pred: Vec<f64> = predicted.iter().map(|a| a.radians()).collect();
    obs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pred.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(obs.into_iter().zip(pred).collect())
}

/// Fisher–Lee T-linear circular correlation coefficient, computed with the
/// O(n) product-sum identity.
pub fn circular_correlation(x: &[Angle], y: &[Angle]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Precondition(
            "circular correlation needs n >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    let (mut c2x, mut s2x, mut c2y, mut s2y) = (0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        s1 += a.cos() * b.cos();
        s2 += a.sin() * b.sin();
        s3 += a.cos() * b.sin();
        s4 += a.sin() * b.cos();
        c2x += (2.0 * a.radians()).cos();
        s2x += (2.0 * a.radians()).sin();
        c2y += (2.0 * b.radians()).cos();
        s2y += (2.0 * b.radians()).sin();
    }
    let num = 4.0 * (s1 * s2 - s3 * s4);
    let den = ((n * n - c2x * c2x - s2x * s2x) * (n * n - c2y * c2y - s2y * s2y)).sqrt();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_vm, RngSeed};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn summary_of_constant_sample() {
        let angles = vec![Angle::new(1.3); 7];
        let s = circular_summary(&angles).unwrap();
        assert_abs_diff_eq!(s.mean_direction.unwrap().radians(), 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(s.resultant_length, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.circular_sd, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn summary_of_cancelling_sample() {
        let angles = vec![Angle::new(0.0), Angle::new(PI)];
        let s = circular_summary(&angles).unwrap();
        assert!(s.mean_direction.is_none());
        assert!(s.resultant_length < 1e-12);
    }

    #[test]
    fn summary_of_quarter_pair() {
        let angles = vec![Angle::new(0.0), Angle::new(FRAC_PI_2)];
        let s = circular_summary(&angles).unwrap();
        assert_abs_diff_eq!(
            s.mean_direction.unwrap().radians(),
            PI / 4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(s.resultant_length, (PI / 4.0).cos(), epsilon = 1e-12);
        assert!(circular_summary(&[]).is_err());
    }

    #[test]
    fn mle_matches_bessel_ratio_inversion() {
        // bisection oracle for the inverse of A(kappa)
        let invert_by_bisection = |rbar: f64| {
            let (mut lo, mut hi) = (0.0f64, 1e4f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if bessel_ratio(mid) < rbar {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        for rbar in [0.1, 0.3, 0.4464, 0.7, 0.9, 0.99] {
            let (kappa, flag) = invert_bessel_ratio(rbar);
            assert!(flag.is_none());
            let oracle = invert_by_bisection(rbar);
            assert!(
                (kappa - oracle).abs() < 1e-6 * oracle.max(1.0),
                "rbar {rbar}: {kappa} vs {oracle}"
            );
        }
        // A(1) = I1(1)/I0(1): inverting it recovers kappa = 1
        let (kappa, _) = invert_bessel_ratio(0.4463899658965345);
        assert_abs_diff_eq!(kappa, 1.0, epsilon = 0.01);
    }

    #[test]
    fn mle_flags_degenerate_samples() {
        let constant = vec![Angle::new(2.0); 50];
        let fit = vm_mle(&constant).unwrap();
        assert_eq!(fit.flag, Some(VmFitFlag::KappaCapped));
        assert_eq!(fit.kappa_hat, KAPPA_CAP);

        let cancelling = vec![Angle::new(0.0), Angle::new(PI)];
        let fit = vm_mle(&cancelling).unwrap();
        assert_eq!(fit.flag, Some(VmFitFlag::ZeroResultant));
        assert_eq!(fit.kappa_hat, 0.0);

        // near-uniform sample gives a small concentration
        let draws = sample_vm(
            &crate::distributions::VonMisesParams::new(Angle::ZERO, 0.0).unwrap(),
            5000,
            RngSeed(3),
        );
        let fit = vm_mle(&draws).unwrap();
        assert!(fit.kappa_hat < 0.11, "kappa {}", fit.kappa_hat);
    }

    #[test]
    fn cdf_limits_and_symmetry() {
        // uniform case
        assert_abs_diff_eq!(
            vm_cdf(Angle::new(1.0), Angle::ZERO, 0.0),
            1.0 / TAU,
            epsilon = 1e-12
        );
        // total mass
        for kappa in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let nearly_full = vm_cdf(Angle::new(TAU - 1e-12), Angle::new(PI), kappa);
            assert_abs_diff_eq!(nearly_full, 1.0, epsilon = 1e-10);
        }
        // symmetric mass below the mode when the mode sits at pi
        let half = vm_cdf(Angle::new(PI), Angle::new(PI), 1.0);
        assert_abs_diff_eq!(half, 0.5, epsilon = 1e-8);
        // monotone in theta
        let mut prev = 0.0;
        for k in 0..=64 {
            let t = TAU * k as f64 / 64.0 * 0.999;
            let c = vm_cdf(Angle::new(t), Angle::new(2.0), 3.0);
            assert!(c >= prev - 1e-12);
            prev = c;
        }
    }

    #[test]
    fn cdf_handles_capped_concentration() {
        let c = vm_cdf(Angle::new(TAU - 1e-9), Angle::new(3.0), KAPPA_CAP);
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-6);
        let below = vm_cdf(Angle::new(2.9), Angle::new(3.0), KAPPA_CAP);
        assert!(below < 0.01);
    }

    #[test]
    fn watson_statistic_rotation_invariant() {
        let draws = sample_vm(
            &crate::distributions::VonMisesParams::new(Angle::new(1.0), 2.0).unwrap(),
            200,
            RngSeed(8),
        );
        let base = watson_u2(&draws).unwrap();
        for offset in [PI / 7.0, 1.0, 3.0] {
            let rotated: Vec<Angle> = draws.iter().map(|a| a.offset(offset)).collect();
            let r = watson_u2(&rotated).unwrap();
            assert_abs_diff_eq!(r.statistic, base.statistic, epsilon = 1e-8);
        }
    }

    #[test]
    fn watson_needs_ten_observations() {
        let angles = vec![Angle::new(0.1); 9];
        assert!(watson_u2(&angles).is_err());
    }

    #[test]
    fn watson_critical_values_contain_published_points() {
        assert_abs_diff_eq!(watson_critical_value_5pct(4.0), 0.113, epsilon = 1e-12);
        assert_abs_diff_eq!(watson_critical_value_5pct(1e9), 0.117, epsilon = 1e-12);
        assert_abs_diff_eq!(watson_critical_value_5pct(0.0), 0.061, epsilon = 1e-12);
        // interpolation between the rows
        let mid = watson_critical_value_5pct(0.25);
        assert!(mid > 0.061 && mid < 0.066);
        // statistics of the size reported for well-fitted residuals do not
        // reject anywhere on the table
        assert!(0.0318 < 0.061);
        assert!(0.0325 < 0.061);
    }

    #[test]
    fn qq_pairs_cases() {
        let a = vec![Angle::new(0.3), Angle::new(0.1), Angle::new(0.2)];
        let pairs = qq_pairs(&a, &a).unwrap();
        for (x, y) in pairs {
            assert_eq!(x, y);
        }

        let shifted: Vec<Angle> = a.iter().map(|v| v.offset(0.1)).collect();
        let pairs = qq_pairs(&a, &shifted).unwrap();
        for (x, y) in pairs {
            assert_abs_diff_eq!(y - x, 0.1, epsilon = 1e-12);
        }

        let single = qq_pairs(&[Angle::new(1.0)], &[Angle::new(2.0)]).unwrap();
        assert_eq!(single.len(), 1);

        assert!(qq_pairs(&a, &a[..2]).is_err());
    }

    #[test]
    fn circular_correlation_detects_dependence() {
        let n = 400;
        let x: Vec<Angle> = (0..n).map(|i| Angle::new(i as f64 * 0.37)).collect();
        let same = circular_correlation(&x, &x).unwrap();
        assert!(same > 0.99);
        let opposite: Vec<Angle> = x.iter().map(|a| Angle::new(-a.radians())).collect();
        let anti = circular_correlation(&x, &opposite).unwrap();
        assert!(anti < -0.99);
    }
}
