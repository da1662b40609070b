//! Textual specs for parameter vectors, covariate families, and error
//! families, e.g. `vm:mu=0,kappa=1` or `sine:kappa1=3,kappa2=3,kappa3=0`.

use std::collections::BTreeMap;

use crate::distributions::{
    BvmCosineParams, BvmSineParams, CovariateModel, ErrorModel, MixtureParams, VonMisesParams,
    WrappedCauchyParams,
};
use crate::error::{Error, Result};
use crate::geometry::Angle;
use crate::mobius::ModelParams;

/// Parses `a,b,c,d,e,f` into a parameter vector (radians).
pub fn parse_params(text: &str) -> Result<ModelParams> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in parameter vector")))
        })
        .collect::<Result<_>>()?;
    if values.len() != 6 {
        return Err(Error::Parse(format!(
            "parameter vector needs 6 comma-separated values, got {}",
            values.len()
        )));
    }
    let p = ModelParams::from_array([
        values[0], values[1], values[2], values[3], values[4], values[5],
    ]);
    p.validity()?;
    Ok(p)
}

fn split_spec(text: &str) -> Result<(&str, BTreeMap<String, f64>)> {
    let (name, rest) = match text.find(':') {
        Some(i) => (&text[..i], &text[i + 1..]),
        None => (text, ""),
    };
    let mut fields = BTreeMap::new();
    if !rest.trim().is_empty() {
        for pair in rest.split(',') {
            let Some((k, v)) = pair.split_once('=') else {
                return Err(Error::Parse(format!("expected key=value, got {pair:?}")));
            };
            let value = v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {v:?} for key {k:?}")))?;
            fields.insert(k.trim().to_string(), value);
        }
    }
    Ok((name.trim(), fields))
}

struct FieldReader {
    fields: BTreeMap<String, f64>,
    spec: String,
}

impl FieldReader {
    fn require(&mut self, key: &str) -> Result<f64> {
        self.fields
            .remove(key)
            .ok_or_else(|| Error::Parse(format!("spec {:?} is missing {key}", self.spec)))
    }

    fn optional(&mut self, key: &str, default: f64) -> f64 {
        self.fields.remove(key).unwrap_or(default)
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.fields.keys().next() {
            return Err(Error::Parse(format!(
                "spec {:?} has unknown key {key:?}",
                self.spec
            )));
        }
        Ok(())
    }
}

/// Parses a covariate family: `vm:mu=<rad>,kappa=<k>` or
/// `wc:mu=<rad>,zeta=<z>`.
pub fn parse_covariates(text: &str) -> Result<CovariateModel> {
    let (name, fields) = split_spec(text)?;
    let mut r = FieldReader {
        fields,
        spec: text.to_string(),
    };
    let model = match name {
        "vm" => CovariateModel::VonMises(VonMisesParams::new(
            Angle::new(r.optional("mu", 0.0)),
            r.require("kappa")?,
        )?),
        "wc" => CovariateModel::WrappedCauchy(WrappedCauchyParams::new(
            Angle::new(r.optional("mu", 0.0)),
            r.require("zeta")?,
        )?),
        other => {
            return Err(Error::Parse(format!(
                "unknown covariate family {other:?} (expected vm or wc)"
            )))
        }
    };
    r.finish()?;
    Ok(model)
}

fn sine_from(r: &mut FieldReader) -> Result<BvmSineParams> {
    BvmSineParams::new(
        Angle::new(r.optional("mu_phi", 0.0)),
        Angle::new(r.optional("mu_theta", 0.0)),
        r.require("kappa1")?,
        r.require("kappa2")?,
        r.require("kappa3")?,
    )
}

fn cosine_from(r: &mut FieldReader) -> Result<BvmCosineParams> {
    BvmCosineParams::new(
        Angle::new(r.optional("mu_phi", 0.0)),
        Angle::new(r.optional("mu_theta", 0.0)),
        r.require("rho1")?,
        r.require("rho2")?,
        r.require("rho3")?,
    )
}

/// Parses an error family: `none`, `sine:kappa1=..,kappa2=..,kappa3=..`,
/// `cosine:rho1=..,rho2=..,rho3=..`, or a mixture naming both component
/// parameter sets plus an optional `weight` (default 0.5). Mean directions
/// default to zero as in the recovery studies.
pub fn parse_errors(text: &str) -> Result<ErrorModel> {
    let (name, fields) = split_spec(text)?;
    let mut r = FieldReader {
        fields,
        spec: text.to_string(),
    };
    let model = match name {
        "none" => ErrorModel::None,
        "sine" => ErrorModel::Sine(sine_from(&mut r)?),
        "cosine" => ErrorModel::Cosine(cosine_from(&mut r)?),
        "mixture" => {
            let weight = r.optional("weight", 0.5);
            let sine = sine_from(&mut r)?;
            let cosine = cosine_from(&mut r)?;
            ErrorModel::Mixture(MixtureParams::new(sine, cosine, weight)?)
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown error family {other:?} (expected none, sine, cosine, or mixture)"
            )))
        }
    };
    r.finish()?;
    Ok(model)
}
