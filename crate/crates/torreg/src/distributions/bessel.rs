//! Modified Bessel functions of the first kind, evaluated by the ascending
//! series `I_m(x) = Σ_k (x/2)^{2k+m} / (k! (k+m)!)`.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 300;
const REL_TOL: f64 = 1e-15;

/// `I_order(x)` for `x ≥ 0` by the ascending series, truncated once a term
/// drops below 1e-15 of the running sum or after 300 terms.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_i requires a finite x >= 0, got {x}"
        )));
    }
    let half = 0.5 * x;
    // leading term (x/2)^order / order!
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    for k in 1..=MAX_TERMS {
        term *= q / (k as f64 * (k as f64 + order as f64));
        sum += term;
        if term <= REL_TOL * sum {
            break;
        }
    }
    Ok(sum)
}

/// `I₀(x) e^{-x}`: overflow-free for arbitrarily large concentrations.
/// Series below 40, asymptotic expansion beyond.
pub(crate) fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 50.0 {
        bessel_i(0, x).expect("nonnegative argument") * (-x).exp()
    } else {
        // I0(x) ~ e^x / sqrt(2 pi x) * (1 + 1/(8x) + 9/(2(8x)^2) + ...)
        let inv8 = 1.0 / (8.0 * x);
        let series = 1.0
            + inv8 * (1.0 + inv8 * (4.5 + inv8 * (37.5 + inv8 * (459.375 + inv8 * 7441.875))));
        series / (std::f64::consts::TAU * x).sqrt()
    }
}

/// The mean resultant length of a von Mises distribution,
/// `A(κ) = I₁(κ)/I₀(κ)`.
pub(crate) fn bessel_ratio(kappa: f64) -> f64 {
    debug_assert!(kappa >= 0.0);
    if kappa == 0.0 {
        0.0
    } else if kappa < 50.0 {
        let i0 = bessel_i(0, kappa).expect("nonnegative argument");
        let i1 = bessel_i(1, kappa).expect("nonnegative argument");
        i1 / i0
    } else {
        let inv = 1.0 / kappa;
        1.0 - inv * (0.5 + inv * (0.125 + inv * 0.125))
    }
}
