//! Parameter estimation by multi-start bounded minimization of the intrinsic
//! loss, Monte Carlo recovery studies, and bootstrap standard errors.

mod monte_carlo;
mod optimizer;

pub use monte_carlo::{monte_carlo_study, McSummary};

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::distributions::RngSeed;
use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::mobius::{params_valid, ModelParams, UNIT_MODULUS_BAND};
use crate::model::Dataset;

/// Per-coordinate box for the optimizer, ordered as the parameter vector
/// `(φ₀, b₁, b₂, b₃, b₄, θ₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub lo: [f64; 6],
    pub hi: [f64; 6],
}

impl ParamBounds {
    pub fn new(lo: [f64; 6], hi: [f64; 6]) -> Result<Self> {
        for i in 0..6 {
            if !(lo[i] < hi[i]) {
                return Err(Error::Precondition(format!(
                    "empty bound box in coordinate {i}: [{}, {}]",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(ParamBounds { lo, hi })
    }

    fn clamp(&self, x: &mut [f64; 6]) {
        for i in 0..6 {
            x[i] = x[i].clamp(self.lo[i], self.hi[i]);
        }
    }
}

impl Default for ParamBounds {
    /// Angles over the full circle, translation coefficients in `[-20, 20]`.
    fn default() -> Self {
        let tau = std::f64::consts::TAU;
        ParamBounds {
            lo: [0.0, -20.0, -20.0, -20.0, -20.0, 0.0],
            hi: [tau, 20.0, 20.0, 20.0, 20.0, tau],
        }
    }
}

/// Configuration of the multi-start fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub restarts: usize,
    pub bounds: ParamBounds,
    /// Central-difference step for the numerical gradient.
    pub grad_step: f64,
    /// Convergence tolerance on the per-iteration loss improvement.
    pub loss_tol: f64,
    pub max_iters: usize,
    pub seed: RngSeed,
    pub geometry: TorusGeometry,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            restarts: 64,
            bounds: ParamBounds::default(),
            grad_step: 1e-6,
            loss_tol: 1e-10,
            max_iters: 500,
            seed: RngSeed(0),
            geometry: TorusGeometry::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Precondition("restarts must be >= 1".into()));
        }
        if !(self.grad_step > 0.0) {
            return Err(Error::Precondition("gradient step must be > 0".into()));
        }
        Ok(())
    }
}

/// Outcome of one optimizer start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartRecord {
    pub init: [f64; 6],
    pub loss: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Best parameters found together with the per-start trace.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: ModelParams,
    pub loss: f64,
    pub starts: Vec<StartRecord>,
    pub standard_errors: Option<[f64; 6]>,
    pub wall_time: Duration,
}

/// Central-difference gradient of a scalar objective over the flat parameter
/// vector `(φ₀, b₁, b₂, b₃, b₄, θ₀)`. The probes are raw coordinate shifts;
/// objectives built on [`ModelParams`] are periodic in the angular
/// coordinates, so the shifts stay meaningful at the `0`/`2π` seam.
pub fn numerical_gradient(
    objective: impl Fn(&[f64; 6]) -> f64,
    at: [f64; 6],
    h: f64,
) -> [f64; 6] {
    optimizer::central_gradient(&|x: &[f64; 6]| objective(x), &at, h)
}

/// Perturb-and-redescend rounds per start after the initial descent.
const HOPS_PER_START: usize = 7;
/// Width of the uniform perturbation applied to the translation coefficients
/// between hops; the angular coordinates are resampled over their full range.
const HOP_SCALE: f64 = 2.0;
/// Hopping stops early once a start has reached this loss.
const HOP_STOP_LOSS: f64 = 1e-9;
/// Consecutive non-improving hops tolerated before a start stops hopping.
const HOP_PATIENCE: usize = 3;
/// Relaxed tolerance for the exploration descents; the incumbent gets a final
/// polish at the configured tolerance.
const COARSE_TOL: f64 = 1e-6;

/// Radial projection out of the unit-modulus exclusion band: a coefficient
/// whose modulus falls inside the band is moved to the nearest band edge
/// plus a margin of one extra band width.
fn nudge_unit_modulus(re: &mut f64, im: &mut f64) {
    let m = (*re * *re + *im * *im).sqrt();
    if (m - 1.0).abs() < UNIT_MODULUS_BAND {
        let target = if m >= 1.0 {
            1.0 + 2.0 * UNIT_MODULUS_BAND
        } else {
            1.0 - 2.0 * UNIT_MODULUS_BAND
        };
        let scale = target / m;
        *re *= scale;
        *im *= scale;
    }
}

fn sanitize_in(bounds: ParamBounds) -> impl Fn(&mut [f64; 6]) {
    move |x: &mut [f64; 6]| {
        bounds.clamp(x);
        let (mut b1, mut b2) = (x[1], x[2]);
        nudge_unit_modulus(&mut b1, &mut b2);
        x[1] = b1;
        x[2] = b2;
        let (mut b3, mut b4) = (x[3], x[4]);
        nudge_unit_modulus(&mut b3, &mut b4);
        x[3] = b3;
        x[4] = b4;
    }
}

/// Multi-start bounded minimization of the total loss. Runs
/// `config.restarts` independent starts from uniform initializations inside
/// the bounds, in parallel over a deterministic per-start seed derivation,
/// and returns the start with the smallest final loss whose parameters are
/// valid. Deterministic for a given `(data, config.seed)` regardless of the
/// number of worker threads.
pub fn fit(data: &Dataset, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if data.len() < 3 {
        return Err(Error::TooFewRows {
            n: data.len(),
            min: 3,
        });
    }
    let t0 = Instant::now();
    let prepared = crate::model::PreparedLoss::new(data, config.geometry);
    let objective = move |x: &[f64; 6]| prepared.loss(&ModelParams::from_array(*x));
    let sanitize = sanitize_in(config.bounds);

    let outcomes: Vec<(StartRecord, [f64; 6])> = (0..config.restarts)
        .into_par_iter()
        .map(|s| {
            let mut rng = config.seed.derive(s as u64).rng();
            let mut x0 = [0.0; 6];
            for i in 0..6 {
                x0[i] = rng.gen_range(config.bounds.lo[i]..config.bounds.hi[i]);
            }
            sanitize(&mut x0);
            let init = x0;
            // Phase 1: coarse descent at a relaxed tolerance.
            let coarse_tol = config.loss_tol.max(COARSE_TOL);
            let coarse_iters = config.max_iters.div_ceil(2);
            let mut best = optimizer::minimize(
                &objective,
                &sanitize,
                x0,
                config.grad_step,
                coarse_tol,
                coarse_iters,
            );
            let mut iterations = best.iterations;
            // Phase 2: iterated local search. Perturb the incumbent and
            // re-descend, keeping the better point; this escapes the shallow
            // basins the loss surface is riddled with. Hopping stops early
            // once the loss is tiny or several hops in a row bring nothing.
            let mut stale = 0usize;
            for _ in 0..HOPS_PER_START {
                if best.value < HOP_STOP_LOSS || stale >= HOP_PATIENCE {
                    break;
                }
                let mut y = best.x;
                y[0] = rng.gen_range(config.bounds.lo[0]..config.bounds.hi[0]);
                y[5] = rng.gen_range(config.bounds.lo[5]..config.bounds.hi[5]);
                for i in 1..5 {
                    y[i] += rng.gen_range(-HOP_SCALE..HOP_SCALE);
                }
                sanitize(&mut y);
                let hop = optimizer::minimize(
                    &objective,
                    &sanitize,
                    y,
                    config.grad_step,
                    coarse_tol,
                    coarse_iters,
                );
                iterations += hop.iterations;
                if hop.value < best.value - coarse_tol {
                    best = hop;
                    stale = 0;
                } else {
                    stale += 1;
                }
            }
            // Phase 3: polish the start's incumbent at the full tolerance, so
            // every start is a self-contained pipeline of its own seed.
            let polished = optimizer::minimize(
                &objective,
                &sanitize,
                best.x,
                config.grad_step,
                config.loss_tol,
                config.max_iters,
            );
            iterations += polished.iterations;
            if polished.value <= best.value {
                best = polished;
            }
            (
                StartRecord {
                    init,
                    loss: best.value,
                    converged: best.converged,
                    iterations,
                },
                best.x,
            )
        })
        .collect();

    let mut best: Option<(f64, [f64; 6])> = None;
    for (record, x) in &outcomes {
        let p = ModelParams::from_array(*x);
        if record.loss.is_finite() && params_valid(&p) {
            if best.map_or(true, |(bl, _)| record.loss < bl) {
                best = Some((record.loss, *x));
            }
        }
    }
    let starts: Vec<StartRecord> = outcomes.iter().map(|(r, _)| *r).collect();
    let (loss, x) = best.ok_or_else(|| {
        let diverged = starts.iter().filter(|r| !r.loss.is_finite()).count();
        Error::EstimationFailed(format!(
            "no start produced valid parameters ({} of {} diverged)",
            diverged,
            starts.len()
        ))
    })?;

    Ok(FitResult {
        params: ModelParams::from_array(x),
        loss,
        starts,
        standard_errors: None,
        wall_time: t0.elapsed(),
    })
}

/// Bootstrap standard-error summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSummary {
    pub se: [f64; 6],
    pub replicates: usize,
    pub failures: usize,
}

/// Restart count used for each bootstrap refit.
pub const BOOTSTRAP_RESTARTS: usize = 8;

/// Nonparametric pair-resampling bootstrap: resamples rows with replacement
/// `b` times, refits each replicate with [`BOOTSTRAP_RESTARTS`] restarts, and
/// reports the per-coordinate spread of the estimates (circular standard
/// deviation for the two angular coordinates).
pub fn bootstrap_se(data: &Dataset, config: &FitConfig, b: usize) -> Result<BootstrapSummary> {
    if b < 20 {
        return Err(Error::Precondition(format!(
            "bootstrap needs at least 20 replicates, got {b}"
        )));
    }
    if data.len() < 3 {
        return Err(Error::TooFewRows {
            n: data.len(),
            min: 3,
        });
    }
    let base = config.seed.derive(u64::MAX);
    let estimates: Vec<Option<[f64; 6]>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let rep_seed = base.derive(i as u64);
            let mut rng = rep_seed.derive(0).rng();
            let rows: Vec<_> = (0..data.len())
                .map(|_| data.rows()[rng.gen_range(0..data.len())])
                .collect();
            let resampled = Dataset::new(rows);
            let rep_config = FitConfig {
                restarts: BOOTSTRAP_RESTARTS,
                seed: rep_seed.derive(1),
                ..*config
            };
            fit(&resampled, &rep_config).ok().map(|r| r.params.to_array())
        })
        .collect();

    let kept: Vec<[f64; 6]> = estimates.iter().flatten().copied().collect();
    let failures = b - kept.len();
    if kept.len() < 2 {
        return Err(Error::EstimationFailed(format!(
            "bootstrap produced {} successful refits of {b}",
            kept.len()
        )));
    }
    let mut se = [0.0; 6];
    for coord in 0..6 {
        let values: Vec<f64> = kept.iter().map(|e| e[coord]).collect();
        se[coord] = if coord == 0 || coord == 5 {
            circular_sd(&values)
        } else {
            linear_sd(&values)
        };
    }
    Ok(BootstrapSummary {
        se,
        replicates: kept.len(),
        failures,
    })
}

pub(crate) fn linear_sd(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)).sqrt()
}

/// Circular standard deviation `sqrt(-2 ln R̄)` of a sample of angles given
/// in radians.
pub(crate) fn circular_sd(values: &[f64]) -> f64 {
    let rbar = resultant_length(values);
    if rbar <= 0.0 {
        f64::INFINITY
    } else {
        (-2.0 * rbar.ln()).max(0.0).sqrt()
    }
}

pub(crate) fn resultant_length(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let s: f64 = values.iter().map(|v| v.sin()).sum();
    let c: f64 = values.iter().map(|v| v.cos()).sum();
    (s * s + c * c).sqrt() / n
}

pub(crate) fn circular_mean_raw(values: &[f64]) -> f64 {
    let s: f64 = values.iter().map(|v| v.sin()).sum();
    let c: f64 = values.iter().map(|v| v.cos()).sum();
    s.atan2(c)
}
