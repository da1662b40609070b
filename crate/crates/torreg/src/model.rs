//! The regression model proper: response simulation, residuals, and the
//! two-component intrinsic loss.
//!
//! Residuals are reduced to `[0, π]` before entering the area maps, matching
//! the minimal-separation reading of the square-angle construction. The total
//! loss of a parameter vector on a dataset is
//!
//! ```text
//! L = (1/n) Σᵢ [A_T(ψᵢ) + A_T(ξᵢ) + A_S(φᵢ)]
//! ```
//!
//! where `ψᵢ, ξᵢ` are the componentwise angular residuals, `φᵢ` is the
//! great-circle deflection between the normals at the observed and predicted
//! points, `A_T` is [`square_angle_torus`] and `A_S` is
//! [`square_angle_sphere`].

use crate::distributions::{ErrorModel, RngSeed};
use crate::error::{Error, Result};
use crate::geometry::{
    angular_distance, great_circle_distance, square_angle_sphere, square_angle_torus, Angle,
    TorusGeometry, TorusPoint,
};
use crate::mobius::{predict_mean, ModelParams};

/// Paired covariate/response observations, with optional row labels
/// (typically timestamps carried through from a data file).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    rows: Vec<(TorusPoint, TorusPoint)>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(rows: Vec<(TorusPoint, TorusPoint)>) -> Self {
        Dataset { rows, labels: None }
    }

    pub fn with_labels(rows: Vec<(TorusPoint, TorusPoint)>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        Ok(Dataset {
            rows,
            labels: Some(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[(TorusPoint, TorusPoint)] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn covariates(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        self.rows.iter().map(|r| r.0)
    }

    pub fn responses(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        self.rows.iter().map(|r| r.1)
    }
}

/// Componentwise angular residuals and the spherical deflection of the
/// normals, all in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPair {
    pub psi: f64,
    pub xi: f64,
    pub sphere_deflection: f64,
}

/// Simulates one response per covariate: the conditional mean direction plus
/// an angular error drawn from `errors`. With [`ErrorModel::None`] the
/// responses equal [`predict_mean`] exactly.
pub fn simulate_responses(
    params: &ModelParams,
    covariates: &[TorusPoint],
    errors: &ErrorModel,
    seed: RngSeed,
) -> Result<Dataset> {
    let noise = errors.sample(covariates.len(), seed);
    let rows = covariates
        .iter()
        .zip(noise)
        .map(|(&cov, eps)| {
            let mean = predict_mean(params, cov)?;
            let response = TorusPoint::new(
                mean.phi.offset(eps.phi.radians()),
                mean.theta.offset(eps.theta.radians()),
            );
            Ok((cov, response))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::new(rows))
}

/// Residuals of one observation under `params`.
pub fn residual_pair(
    params: &ModelParams,
    covariate: TorusPoint,
    response: TorusPoint,
) -> Result<ResidualPair> {
    let mean = predict_mean(params, covariate)?;
    Ok(ResidualPair {
        psi: angular_distance(response.phi, mean.phi),
        xi: angular_distance(response.theta, mean.theta),
        sphere_deflection: great_circle_distance(response, mean),
    })
}

/// Summation with pairwise recursion: bit-stable regardless of how callers
/// parallelize around it.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1..=8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn mean_over_rows(
    data: &Dataset,
    mut contribution: impl FnMut(ResidualPair) -> Result<f64>,
    params: &ModelParams,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let terms = data
        .rows()
        .iter()
        .map(|&(cov, resp)| contribution(residual_pair(params, cov, resp)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// Torus component of the loss: mean of `A_T(ψ) + A_T(ξ)` over the rows.
pub fn loss_torus(params: &ModelParams, data: &Dataset, geom: TorusGeometry) -> Result<f64> {
    mean_over_rows(
        data,
        |r| Ok(square_angle_torus(geom, r.psi)? + square_angle_torus(geom, r.xi)?),
        params,
    )
}

/// Sphere component of the loss: mean of `A_S(deflection)` over the rows.
pub fn loss_sphere(params: &ModelParams, data: &Dataset) -> Result<f64> {
    mean_over_rows(data, |r| square_angle_sphere(r.sphere_deflection), params)
}

/// Total loss: torus component plus sphere component, computed in one pass.
pub fn loss_total(params: &ModelParams, data: &Dataset, geom: TorusGeometry) -> Result<f64> {
    mean_over_rows(
        data,
        |r| {
            Ok(square_angle_torus(geom, r.psi)?
                + square_angle_torus(geom, r.xi)?
                + square_angle_sphere(r.sphere_deflection)?)
        },
        params,
    )
}

/// Loss evaluator with the per-row constants (covariate unit vectors,
/// response trigonometry) cached once. Produces the same value as
/// [`loss_total`] up to f64 reassociation; the optimizer's hot loop uses this
/// path.
pub(crate) struct PreparedLoss {
    rows: Vec<PreparedRow>,
    geom: TorusGeometry,
}

struct PreparedRow {
    z: num_complex::Complex64,
    w: num_complex::Complex64,
    resp_phi: Angle,
    resp_theta: Angle,
    sin_resp_phi: f64,
    cos_resp_phi: f64,
    sin_resp_theta: f64,
    cos_resp_theta: f64,
}

impl PreparedLoss {
    pub(crate) fn new(data: &Dataset, geom: TorusGeometry) -> Self {
        let rows = data
            .rows()
            .iter()
            .map(|&(cov, resp)| PreparedRow {
                z: num_complex::Complex64::new(cov.phi.cos(), cov.phi.sin()),
                w: num_complex::Complex64::new(cov.theta.cos(), cov.theta.sin()),
                resp_phi: resp.phi,
                resp_theta: resp.theta,
                sin_resp_phi: resp.phi.sin(),
                cos_resp_phi: resp.phi.cos(),
                sin_resp_theta: resp.theta.sin(),
                cos_resp_theta: resp.theta.cos(),
            })
            .collect();
        PreparedLoss { rows, geom }
    }

    /// Total loss at `params`; +inf when a link denominator degenerates.
    pub(crate) fn loss(&self, params: &crate::mobius::ModelParams) -> f64 {
        let beta0 = num_complex::Complex64::new(params.phi0.cos(), params.phi0.sin());
        let gamma0 = num_complex::Complex64::new(params.theta0.cos(), params.theta0.sin());
        let beta1 = params.beta1();
        let gamma1 = params.gamma1();
        let beta1_conj = beta1.conj();
        let gamma1_conj = gamma1.conj();
        let geom = self.geom;
        let mut terms = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let den1 = row.w + beta1_conj * row.z;
            let den2 = row.z + gamma1_conj * row.w;
            if den1.norm_sqr() <= 1e-24 || den2.norm_sqr() <= 1e-24 {
                return f64::INFINITY;
            }
            let f1 = beta0 * ((row.z + row.w * beta1) / den1);
            let f2 = gamma0 * ((row.w + row.z * gamma1) / den2);
            let mean_phi = Angle::new(f1.im.atan2(f1.re));
            let mean_theta = Angle::new(f2.im.atan2(f2.re));
            let psi = angular_distance(row.resp_phi, mean_phi);
            let xi = angular_distance(row.resp_theta, mean_theta);
            // unit-modulus outputs carry the mean's sines/cosines directly
            let n1 = f1.norm();
            let n2 = f2.norm();
            let (cos_mp, sin_mp) = (f1.re / n1, f1.im / n1);
            let (cos_mt, sin_mt) = (f2.re / n2, f2.im / n2);
            let cos_dphi = row.cos_resp_phi * cos_mp + row.sin_resp_phi * sin_mp;
            let inner =
                row.sin_resp_theta * sin_mt + row.cos_resp_theta * cos_mt * cos_dphi;
            let deflection = inner.clamp(-1.0, 1.0).acos();
            let torus_part = geom.minor_radius()
                * (psi * (geom.major_radius() * psi + geom.minor_radius() * psi.sin())
                    + xi * (geom.major_radius() * xi + geom.minor_radius() * xi.sin()));
            let sphere_part = if deflection <= std::f64::consts::FRAC_PI_2 {
                deflection * deflection.sin()
            } else {
                deflection * (2.0 - deflection.sin())
            };
            terms.push(torus_part + sphere_part);
        }
        pairwise_sum(&terms) / terms.len() as f64
    }
}
