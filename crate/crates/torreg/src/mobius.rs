//! Generalized Möbius link functions mapping the torus to itself.
//!
//! The regression curve is the pair of maps
//!
//! ```text
//! f₁(z, w) = β₀ (z + w β₁) / (w + β̄₁ z)
//! f₂(z, w) = γ₀ (w + z γ₁) / (z + γ̄₁ w)
//! ```
//!
//! with `z, w` on the unit circle, rotation coefficients `β₀, γ₀` on the unit
//! circle, and free complex coefficients `β₁, γ₁` of modulus ≠ 1. Both
//! components have unit modulus for unit-modulus inputs, so the pair maps the
//! torus onto itself, and distinct coefficient pairs induce distinct maps.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Angle, TorusPoint};

/// Width of the exclusion band around coefficient modulus 1. The link maps
/// degenerate continuously as `|β₁| → 1`, so validity requires staying a
/// finite distance away.
pub const UNIT_MODULUS_BAND: f64 = 1e-6;

/// Denominators smaller than this are treated as singular.
const SINGULAR_EPS: f64 = 1e-12;

/// A complex number constrained to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitComplex {
    re: f64,
    im: f64,
}

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex { re: 1.0, im: 0.0 };

    /// Builds `e^{iα}` from an angle; always exactly on the circle.
    pub fn from_angle(angle: Angle) -> Self {
        UnitComplex {
            re: angle.cos(),
            im: angle.sin(),
        }
    }

    /// Checked constructor: `re² + im²` must be 1 within 1e-12.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let norm_sq = re * re + im * im;
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "({re}, {im}) is not on the unit circle: |z|^2 = {norm_sq}"
            )));
        }
        Ok(UnitComplex { re, im })
    }

    pub fn re(self) -> f64 {
        self.re
    }

    pub fn im(self) -> f64 {
        self.im
    }

    pub fn arg(self) -> Angle {
        Angle::new(self.im.atan2(self.re))
    }

    pub fn conj(self) -> Self {
        UnitComplex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn from_quotient(q: Complex64) -> Self {
        debug_assert!(
            (q.norm() - 1.0).abs() < 1e-9,
            "link output drifted off the circle: |q| = {}",
            q.norm()
        );
        UnitComplex { re: q.re, im: q.im }
    }
}

impl fmt::Display for UnitComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re, self.im)
    }
}

impl std::ops::Mul for UnitComplex {
    type Output = UnitComplex;

    fn mul(self, rhs: UnitComplex) -> UnitComplex {
        UnitComplex {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

/// The six real parameters of the regression map:
/// `β₀ = e^{i φ₀}`, `β₁ = b₁ + i b₂`, `γ₀ = e^{i θ₀}`, `γ₁ = b₃ + i b₄`.
///
/// This is the vector the optimizer works on and the recovery studies report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub phi0: Angle,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub theta0: Angle,
}

impl ModelParams {
    pub fn new(phi0: Angle, b1: f64, b2: f64, b3: f64, b4: f64, theta0: Angle) -> Self {
        ModelParams {
            phi0,
            b1,
            b2,
            b3,
            b4,
            theta0,
        }
    }

    /// Builds from the flat vector `(φ₀, b₁, b₂, b₃, b₄, θ₀)`, wrapping the
    /// angular coordinates into `[0, 2π)`.
    pub fn from_array(v: [f64; 6]) -> Self {
        ModelParams {
            phi0: Angle::new(v[0]),
            b1: v[1],
            b2: v[2],
            b3: v[3],
            b4: v[4],
            theta0: Angle::new(v[5]),
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.phi0.radians(),
            self.b1,
            self.b2,
            self.b3,
            self.b4,
            self.theta0.radians(),
        ]
    }

    pub fn beta0(self) -> UnitComplex {
        UnitComplex::from_angle(self.phi0)
    }

    pub fn beta1(self) -> Complex64 {
        Complex64::new(self.b1, self.b2)
    }

    pub fn gamma0(self) -> UnitComplex {
        UnitComplex::from_angle(self.theta0)
    }

    pub fn gamma1(self) -> Complex64 {
        Complex64::new(self.b3, self.b4)
    }

    /// Checks the modulus exclusion bands; `Err` names the offending
    /// coefficient.
    pub fn validity(self) -> Result<()> {
        let m1 = self.beta1().norm();
        if (m1 - 1.0).abs() < UNIT_MODULUS_BAND {
            return Err(Error::InvalidModulus {
                which: "beta1",
                modulus: m1,
                band: UNIT_MODULUS_BAND,
            });
        }
        let m2 = self.gamma1().norm();
        if (m2 - 1.0).abs() < UNIT_MODULUS_BAND {
            return Err(Error::InvalidModulus {
                which: "gamma1",
                modulus: m2,
                band: UNIT_MODULUS_BAND,
            });
        }
        Ok(())
    }
}

/// True iff both coefficient moduli stay outside the exclusion band; the
/// `Err` of [`ModelParams::validity`] carries the diagnostic.
pub fn params_valid(params: &ModelParams) -> bool {
    params.validity().is_ok()
}

fn mobius_component(
    num_base: UnitComplex,
    den_base: UnitComplex,
    rotation: UnitComplex,
    coeff: Complex64,
    denominator_name: &'static str,
) -> Result<UnitComplex> {
    let num = num_base.to_complex() + den_base.to_complex() * coeff;
    let den = den_base.to_complex() + coeff.conj() * num_base.to_complex();
    let mag = den.norm();
    if mag <= SINGULAR_EPS {
        return Err(Error::SingularLink {
            denominator: denominator_name,
            magnitude: mag,
        });
    }
    Ok(UnitComplex::from_quotient(
        rotation.to_complex() * (num / den),
    ))
}

/// First link component `β₀ (z + w β₁) / (w + β̄₁ z)`.
pub fn link_f1(z: UnitComplex, w: UnitComplex, params: &ModelParams) -> Result<UnitComplex> {
    mobius_component(z, w, params.beta0(), params.beta1(), "w + conj(beta1) z")
}

/// Second link component `γ₀ (w + z γ₁) / (z + γ̄₁ w)`.
pub fn link_f2(z: UnitComplex, w: UnitComplex, params: &ModelParams) -> Result<UnitComplex> {
    mobius_component(w, z, params.gamma0(), params.gamma1(), "z + conj(gamma1) w")
}

/// Conditional mean direction of the response at a covariate point:
/// `(arg f₁, arg f₂)` as canonical angles.
pub fn predict_mean(params: &ModelParams, covariate: TorusPoint) -> Result<TorusPoint> {
    let z = UnitComplex::from_angle(covariate.phi);
    let w = UnitComplex::from_angle(covariate.theta);
    let u = link_f1(z, w, params)?;
    let v = link_f2(z, w, params)?;
    Ok(TorusPoint::new(u.arg(), v.arg()))
}

/// Parameter update matching a rotation of the responses by `(W₁, W₂)`:
/// `β₀ ← W₁ β₀`, `γ₀ ← W₂ γ₀`, translation coefficients unchanged. Predictions
/// under the new parameters are the old predictions rotated by
/// `(arg W₁, arg W₂)`.
pub fn rotate_response_params(params: &ModelParams, w1: UnitComplex, w2: UnitComplex) -> ModelParams {
    ModelParams {
        phi0: params.phi0.offset(w1.arg().radians()),
        theta0: params.theta0.offset(w2.arg().radians()),
        ..*params
    }
}

/// Parameter update matching a rotation of the covariates by `(W₁, W₂)`:
/// `β₀ ← W̄₁W₂ β₀`, `β₁ ← (W₁/W₂) β₁`, `γ₀ ← W̄₂W₁ γ₀`, `γ₁ ← (W₂/W₁) γ₁`.
/// Evaluating the links at `(W₁ z, W₂ w)` under the new parameters reproduces
/// the original predictions exactly.
pub fn rotate_covariate_params(
    params: &ModelParams,
    w1: UnitComplex,
    w2: UnitComplex,
) -> ModelParams {
    let a1 = w1.arg().radians();
    let a2 = w2.arg().radians();
    let beta1 = (w1 * w2.conj()).to_complex() * params.beta1();
    let gamma1 = (w2 * w1.conj()).to_complex() * params.gamma1();
    ModelParams {
        phi0: params.phi0.offset(a2 - a1),
        b1: beta1.re,
        b2: beta1.im,
        b3: gamma1.re,
        b4: gamma1.im,
        theta0: params.theta0.offset(a1 - a2),
    }
}
