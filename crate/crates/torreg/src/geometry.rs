//! Intrinsic geometry of the embedded curved torus and of the unit sphere
//! traced out by its surface normals.
//!
//! The curved torus with horizontal radius `R` and vertical radius `r` is the
//! image of `(φ, θ) ↦ ((R + r cos θ) cos φ, (R + r cos θ) sin φ, r sin θ)`.
//! Its area element is `r (R + r cos θ) dφ dθ`, which gives the square-angle
//! area [`square_angle_torus`]: the area of the coordinate square `[0, δ]²`
//! under that element. The analogous quantity on the unit sphere is
//! [`square_angle_sphere`]. Both play the role the squared residual plays in
//! ordinary least squares.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use crate::error::{Error, Result};

/// An angle stored as its canonical representative in `[0, 2π)`.
///
/// Construction wraps any finite real input modulo 2π, so arithmetic on raw
/// radians can be re-canonicalized cheaply via [`Angle::new`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        debug_assert!(radians.is_finite(), "angle must be finite");
        let mut v = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if v >= TAU {
            v = 0.0;
        }
        Angle(v)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// Returns `self + delta`, wrapped back into `[0, 2π)`.
    pub fn offset(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }

    /// Signed representative in `[-π, π)`.
    pub fn signed(self) -> f64 {
        if self.0 >= PI {
            self.0 - TAU
        } else {
            self.0
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point on the torus: horizontal (toroidal) angle `phi` and vertical
/// (poloidal) angle `theta`, both canonical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub phi: Angle,
    pub theta: Angle,
}

impl TorusPoint {
    pub fn new(phi: Angle, theta: Angle) -> Self {
        TorusPoint { phi, theta }
    }

    pub fn from_radians(phi: f64, theta: f64) -> Self {
        TorusPoint {
            phi: Angle::new(phi),
            theta: Angle::new(theta),
        }
    }
}

/// A vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Radii of the embedding ring torus: horizontal radius `R` and vertical
/// radius `r` with `R ≥ r > 0`. The degenerate horn case `R = r` is allowed;
/// `R < r` (self-intersecting spindle) is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGeometry {
    major_radius: f64,
    minor_radius: f64,
}

impl TorusGeometry {
    pub fn new(major_radius: f64, minor_radius: f64) -> Result<Self> {
        if !(minor_radius > 0.0 && major_radius.is_finite() && minor_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "torus radii must be positive and finite, got R = {major_radius}, r = {minor_radius}"
            )));
        }
        if major_radius < minor_radius {
            return Err(Error::Domain(format!(
                "spindle torus rejected: R = {major_radius} < r = {minor_radius}"
            )));
        }
        Ok(TorusGeometry {
            major_radius,
            minor_radius,
        })
    }

    /// Horizontal radius `R`.
    pub fn major_radius(self) -> f64 {
        self.major_radius
    }

    /// Vertical radius `r`.
    pub fn minor_radius(self) -> f64 {
        self.minor_radius
    }
}

impl Default for TorusGeometry {
    /// `R = 2, r = 1`: the midpoint of the radius-ratio range the estimator
    /// is exercised over.
    fn default() -> Self {
        TorusGeometry {
            major_radius: 2.0,
            minor_radius: 1.0,
        }
    }
}

/// Embeds a parameter point into ℝ³ on the curved torus.
pub fn embed_torus(geom: TorusGeometry, p: TorusPoint) -> Vec3 {
    let (big_r, small_r) = (geom.major_radius, geom.minor_radius);
    let ring = big_r + small_r * p.theta.cos();
    Vec3::new(
        ring * p.phi.cos(),
        ring * p.phi.sin(),
        small_r * p.theta.sin(),
    )
}

/// Area density `r (R + r cos θ)` of the curved torus at vertical angle θ.
pub fn torus_area_density(geom: TorusGeometry, theta: Angle) -> f64 {
    geom.minor_radius * (geom.major_radius + geom.minor_radius * theta.cos())
}

/// Area of the coordinate square `[0, δ]²` under the torus area element:
/// `∫₀^δ ∫₀^δ r (R + r cos t) dφ dt = r δ (R δ + r sin δ)`.
///
/// `delta` must already be reduced to `[0, π]` (see [`angular_distance`]).
pub fn square_angle_torus(geom: TorusGeometry, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let (big_r, small_r) = (geom.major_radius, geom.minor_radius);
    Ok(small_r * delta * (big_r * delta + small_r * delta.sin()))
}

/// Area of the coordinate square `[0, δ]²` under the unit-sphere area element
/// `|cos t| dp dt`: equals `δ sin δ` for `δ ≤ π/2` and `δ (2 − sin δ)` beyond.
pub fn square_angle_sphere(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta <= FRAC_PI_2 {
        Ok(delta * delta.sin())
    } else {
        Ok(delta * (2.0 - delta.sin()))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&delta) {
        return Err(Error::Domain(format!(
            "square-angle argument must lie in [0, π], got {delta}"
        )));
    }
    Ok(())
}

/// Minimal angular separation of two angles, in `[0, π]`.
pub fn angular_distance(a: Angle, b: Angle) -> f64 {
    let d = (a.radians() - b.radians()).abs();
    d.min(TAU - d).min(PI)
}

/// Unit outward normal of the curved torus at `p`; independent of the radii.
pub fn torus_normal(p: TorusPoint) -> Vec3 {
    Vec3::new(
        p.phi.cos() * p.theta.cos(),
        p.phi.sin() * p.theta.cos(),
        p.theta.sin(),
    )
}

/// Great-circle distance on the unit sphere between the surface normals at
/// two torus points:
/// `arccos[sin θ₁ sin θ₂ + cos θ₁ cos θ₂ cos(φ₁ − φ₂)]`.
///
/// The inner product is clamped to `[-1, 1]` so nearly identical normals
/// cannot produce NaN.
pub fn great_circle_distance(p1: TorusPoint, p2: TorusPoint) -> f64 {
    let inner = p1.theta.sin() * p2.theta.sin()
        + p1.theta.cos() * p2.theta.cos() * (p1.phi.radians() - p2.phi.radians()).cos();
    inner.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Midpoint-rule quadrature of `density(t)` over the square `[0, δ]²`,
    /// where the integrand depends on the second coordinate only. Independent
    /// of the closed forms above.
    fn square_quadrature(delta: f64, density: impl Fn(f64) -> f64) -> f64 {
        let n = 4000;
        let h = delta / n as f64;
        let inner: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                density(t)
            })
            .sum::<f64>()
            * h;
        delta * inner
    }

    fn geom21() -> TorusGeometry {
        TorusGeometry::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn embed_axis_points() {
        let g = geom21();
        let p = embed_torus(g, TorusPoint::from_radians(0.0, 0.0));
        assert_abs_diff_eq!(p.x, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-15);

        let p = embed_torus(g, TorusPoint::from_radians(PI, 0.0));
        assert_abs_diff_eq!(p.x, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);

        let p = embed_torus(g, TorusPoint::from_radians(0.0, FRAC_PI_2));
        assert_abs_diff_eq!(p.x, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn area_density_values() {
        let g = geom21();
        assert_abs_diff_eq!(torus_area_density(g, Angle::new(0.0)), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(torus_area_density(g, Angle::new(PI)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            torus_area_density(g, Angle::new(FRAC_PI_2)),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn square_angle_torus_matches_quadrature() {
        let g = geom21();
        assert_eq!(square_angle_torus(g, 0.0).unwrap(), 0.0);

        // frozen values computed with the quadrature oracle
        let half_pi = square_angle_torus(g, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(half_pi, FRAC_PI_2 * (PI + 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(half_pi, 6.505_598_5, epsilon = 1e-6);
        let full_pi = square_angle_torus(g, PI).unwrap();
        assert_abs_diff_eq!(full_pi, 2.0 * PI * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(full_pi, 19.739_208_802_178_7, epsilon = 1e-9);

        // grid agreement with the oracle at relative error ≤ 1e-6
        for geom in [geom21(), TorusGeometry::new(3.0, 0.5).unwrap()] {
            let density = |t: f64| {
                geom.minor_radius() * (geom.major_radius() + geom.minor_radius() * t.cos())
            };
            for k in 1..=50 {
                let delta = PI * k as f64 / 50.0;
                let expected = square_quadrature(delta, density);
                let got = square_angle_torus(geom, delta).unwrap();
                assert!(
                    (got - expected).abs() <= 1e-6 * expected.abs().max(1e-12),
                    "delta = {delta}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn square_angle_sphere_matches_quadrature() {
        assert_eq!(square_angle_sphere(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            square_angle_sphere(FRAC_PI_2).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(square_angle_sphere(PI).unwrap(), TAU, epsilon = 1e-12);

        for k in 1..=50 {
            let delta = PI * k as f64 / 50.0;
            let expected = square_quadrature(delta, |t| t.cos().abs());
            let got = square_angle_sphere(delta).unwrap();
            assert!(
                (got - expected).abs() <= 1e-6 * expected.abs().max(1e-12),
                "delta = {delta}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn square_angle_domain_errors() {
        let g = geom21();
        assert!(square_angle_torus(g, -0.1).is_err());
        assert!(square_angle_torus(g, PI + 0.1).is_err());
        assert!(square_angle_sphere(-1e-9).is_err());
        assert!(square_angle_sphere(4.0).is_err());
    }

    #[test]
    fn angular_distance_cases() {
        assert_abs_diff_eq!(
            angular_distance(Angle::new(0.0), Angle::new(FRAC_PI_2)),
            FRAC_PI_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            angular_distance(Angle::new(0.1), Angle::new(TAU - 0.1)),
            0.2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            angular_distance(Angle::new(PI), Angle::new(0.0)),
            PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn normal_axis_points() {
        let n = torus_normal(TorusPoint::from_radians(0.0, 0.0));
        assert_abs_diff_eq!(n.x, 1.0, epsilon = 1e-15);
        let n = torus_normal(TorusPoint::from_radians(FRAC_PI_2, 0.0));
        assert_abs_diff_eq!(n.y, 1.0, epsilon = 1e-12);
        let n = torus_normal(TorusPoint::from_radians(0.0, FRAC_PI_2));
        assert_abs_diff_eq!(n.z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn great_circle_cases() {
        let p = TorusPoint::from_radians(0.7, 1.1);
        assert_eq!(great_circle_distance(p, p), 0.0);

        let a = TorusPoint::from_radians(0.0, 0.0);
        let b = TorusPoint::from_radians(PI, 0.0);
        assert_abs_diff_eq!(great_circle_distance(a, b), PI, epsilon = 1e-12);

        // cross-checked against the 3-D dot product of the normals
        let c = TorusPoint::from_radians(FRAC_PI_2, PI / 4.0);
        let d = great_circle_distance(a, c);
        assert_abs_diff_eq!(d, FRAC_PI_2, epsilon = 1e-12);
        let via_normals = torus_normal(a).dot(torus_normal(c)).clamp(-1.0, 1.0).acos();
        assert_abs_diff_eq!(d, via_normals, epsilon = 1e-12);
    }

    #[test]
    fn great_circle_triangle_inequality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let pts: Vec<TorusPoint> = (0..3)
                .map(|_| TorusPoint::from_radians(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU))
                .collect();
            let ab = great_circle_distance(pts[0], pts[1]);
            let bc = great_circle_distance(pts[1], pts[2]);
            let ac = great_circle_distance(pts[0], pts[2]);
            assert!(ac <= ab + bc + 1e-9);
            assert_abs_diff_eq!(ab, great_circle_distance(pts[1], pts[0]), epsilon = 1e-15);
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(TorusGeometry::new(2.0, 1.0).is_ok());
        assert!(TorusGeometry::new(1.0, 1.0).is_ok());
        assert!(TorusGeometry::new(1.0, 2.0).is_err());
        assert!(TorusGeometry::new(1.0, 0.0).is_err());
        assert!(TorusGeometry::new(-1.0, -2.0).is_err());
    }

    proptest! {
        #[test]
        fn normals_have_unit_norm(phi in 0.0..TAU, theta in 0.0..TAU) {
            let n = torus_normal(TorusPoint::from_radians(phi, theta));
            prop_assert!((n.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angular_distance_is_shift_invariant(
            a in -10.0..10.0f64,
            b in -10.0..10.0f64,
            c in -10.0..10.0f64,
        ) {
            let base = angular_distance(Angle::new(a), Angle::new(b));
            let shifted = angular_distance(Angle::new(a + c), Angle::new(b + c));
            prop_assert!((base - shifted).abs() < 1e-9);
        }

        #[test]
        fn square_angle_torus_nondecreasing(
            lo in 0.0..PI,
            hi in 0.0..PI,
            ratio in 0.1..1.0f64,
        ) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let geom = TorusGeometry::new(2.0, 2.0 * ratio).unwrap();
            let a = square_angle_torus(geom, lo).unwrap();
            let b = square_angle_torus(geom, hi).unwrap();
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn angle_wraps_into_range(x in -1e6..1e6f64) {
            let a = Angle::new(x);
            prop_assert!((0.0..TAU).contains(&a.radians()));
        }
    }
}
