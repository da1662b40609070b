//! Command-line surface: CSV ingestion, configuration, and the subcommands
//! `simulate`, `fit`, `predict`, `mc-study`, `diagnose`, `plot`.
//!
//! Exit codes: 0 success, 2 usage, 3 parse (including I/O), 4 precondition,
//! 5 estimation failure.

mod csvio;
mod report;
mod spec;

pub use csvio::{load_covariates, load_dataset, write_dataset, write_predictions, AngleUnit};
pub use report::{parse_fit_report, render_fit_report};
pub use spec::{parse_covariates, parse_errors, parse_params};

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::{circular_summary, qq_pairs, watson_u2, VmFitFlag};
use crate::distributions::RngSeed;
use crate::error::{Error, Result};
use crate::estimation::{bootstrap_se, fit, monte_carlo_study, FitConfig};
use crate::geometry::{Angle, TorusGeometry, TorusPoint};
use crate::mobius::{predict_mean, ModelParams};
use crate::model::Dataset;
use crate::viz::{circular_scatter_svg, qq_plot_svg, spoke_plot_svg, Marker, PlotSeries};

pub mod exit_codes {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const PRECONDITION: i32 = 4;
    pub const ESTIMATION: i32 = 5;
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Io(_) => exit_codes::PARSE,
        Error::EstimationFailed(_) => exit_codes::ESTIMATION,
        Error::Domain(_)
        | Error::SingularLink { .. }
        | Error::InvalidModulus { .. }
        | Error::EmptyDataset
        | Error::TooFewRows { .. }
        | Error::LengthMismatch { .. }
        | Error::Precondition(_) => exit_codes::PRECONDITION,
    }
}

#[derive(Parser)]
#[command(
    name = "torreg",
    version,
    about = "Torus-to-torus regression: simulate, fit, predict, and diagnose paired angular data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonOpts {
    /// Plain key=value configuration file; explicit flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Horizontal torus radius R.
    #[arg(long)]
    radius_major: Option<f64>,
    /// Vertical torus radius r.
    #[arg(long)]
    radius_minor: Option<f64>,
    /// Number of optimizer restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Master seed for all randomized steps.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum optimizer iterations per start.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Convergence tolerance on the loss improvement.
    #[arg(long)]
    loss_tol: Option<f64>,
    /// Central-difference gradient step.
    #[arg(long)]
    grad_step: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Unit of the direction columns in CSV files.
    #[arg(long, value_enum)]
    unit: Option<AngleUnit>,
    /// Bootstrap replicates for standard errors (0 disables).
    #[arg(long)]
    bootstrap: Option<usize>,
}

/// Fully resolved run configuration: defaults, then config file, then flags.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub fit: FitConfig,
    pub unit: AngleUnit,
    pub bootstrap: usize,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fit: FitConfig::default(),
            unit: AngleUnit::Degrees,
            bootstrap: 0,
            threads: None,
        }
    }
}

fn apply_config_file(cfg: &mut RunConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut major = cfg.fit.geometry.major_radius();
    let mut minor = cfg.fit.geometry.minor_radius();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse(format!(
                "{}:{}: expected key = value",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Parse(format!("{}: bad {what}: {value:?}", path.display()));
        match key {
            "radius_major" => major = value.parse().map_err(|_| bad("radius_major"))?,
            "radius_minor" => minor = value.parse().map_err(|_| bad("radius_minor"))?,
            "restarts" => cfg.fit.restarts = value.parse().map_err(|_| bad("restarts"))?,
            "seed" => cfg.fit.seed = RngSeed(value.parse().map_err(|_| bad("seed"))?),
            "max_iters" => cfg.fit.max_iters = value.parse().map_err(|_| bad("max_iters"))?,
            "loss_tol" => cfg.fit.loss_tol = value.parse().map_err(|_| bad("loss_tol"))?,
            "grad_step" => cfg.fit.grad_step = value.parse().map_err(|_| bad("grad_step"))?,
            "threads" => cfg.threads = Some(value.parse().map_err(|_| bad("threads"))?),
            "bootstrap" => cfg.bootstrap = value.parse().map_err(|_| bad("bootstrap"))?,
            "unit" => cfg.unit = value.parse()?,
            other => {
                return Err(Error::Parse(format!(
                    "{}: unknown configuration key {other:?}",
                    path.display()
                )))
            }
        }
    }
    cfg.fit.geometry = TorusGeometry::new(major, minor)?;
    Ok(())
}

fn resolve(opts: &CommonOpts) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        apply_config_file(&mut cfg, path)?;
    }
    let mut major = cfg.fit.geometry.major_radius();
    let mut minor = cfg.fit.geometry.minor_radius();
    if let Some(r) = opts.radius_major {
        major = r;
    }
    if let Some(r) = opts.radius_minor {
        minor = r;
    }
    cfg.fit.geometry = TorusGeometry::new(major, minor)?;
    if let Some(v) = opts.restarts {
        cfg.fit.restarts = v;
    }
    if let Some(v) = opts.seed {
        cfg.fit.seed = RngSeed(v);
    }
    if let Some(v) = opts.max_iters {
        cfg.fit.max_iters = v;
    }
    if let Some(v) = opts.loss_tol {
        cfg.fit.loss_tol = v;
    }
    if let Some(v) = opts.grad_step {
        cfg.fit.grad_step = v;
    }
    if let Some(v) = opts.threads {
        cfg.threads = Some(v);
    }
    if let Some(v) = opts.unit {
        cfg.unit = v;
    }
    if let Some(v) = opts.bootstrap {
        cfg.bootstrap = v;
    }
    cfg.fit.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    CircularScatter,
    Spoke,
    Qq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Component {
    Phi,
    Theta,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a covariate/response dataset from known parameters.
    Simulate {
        /// Parameter vector `phi0,b1,b2,b3,b4,theta0` in radians.
        #[arg(long)]
        params: String,
        /// Covariate family, e.g. `vm:mu=0,kappa=1` or `wc:mu=3.1416,zeta=0.2`.
        #[arg(long)]
        covariates: String,
        /// Error family, e.g. `none` or `sine:kappa1=3,kappa2=3,kappa3=0`.
        #[arg(long, default_value = "none")]
        errors: String,
        /// Number of rows.
        #[arg(short, long)]
        n: usize,
        /// Output CSV path (a `.meta` sidecar records the configuration).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit the regression to a dataset and write a report.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Predict responses for a covariate CSV using a fit report.
    Predict {
        /// Fit report produced by `torreg fit`.
        #[arg(long)]
        fit: PathBuf,
        /// CSV with `cov_phi`, `cov_theta` columns.
        #[arg(long)]
        covariates_csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Monte Carlo parameter-recovery study.
    McStudy {
        /// True parameter vector `phi0,b1,b2,b3,b4,theta0` in radians.
        #[arg(long)]
        true_params: String,
        #[arg(long)]
        covariates: String,
        /// Error family; repeat the flag for several table rows.
        #[arg(long, required = true)]
        errors: Vec<String>,
        /// Comma-separated sample sizes, e.g. `50,150,500`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Residual diagnostics for a fitted model.
    Diagnose {
        #[arg(long)]
        fit: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Report path; QQ CSVs are written alongside as `<out>.phi.qq.csv`
        /// and `<out>.theta.qq.csv`.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Render an SVG plot of observed vs predicted directions.
    Plot {
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        fit: PathBuf,
        #[arg(long, value_enum, default_value_t = Component::Phi)]
        component: Component,
        #[arg(long, default_value_t = 600)]
        size: u32,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Entry point; returns the process exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let common = match &cli.command {
        Command::Simulate { common, .. }
        | Command::Fit { common, .. }
        | Command::Predict { common, .. }
        | Command::McStudy { common, .. }
        | Command::Diagnose { common, .. }
        | Command::Plot { common, .. } => common.clone(),
    };
    let outcome = resolve(&common).and_then(|cfg| match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(|| execute(&cli.command, &cfg)),
        None => execute(&cli.command, &cfg),
    });
    match outcome {
        Ok(()) => exit_codes::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Simulate {
            params,
            covariates,
            errors,
            n,
            out,
            ..
        } => cmd_simulate(params, covariates, errors, *n, out, cfg),
        Command::Fit { data, out, .. } => cmd_fit(data, out, cfg),
        Command::Predict {
            fit,
            covariates_csv,
            out,
            ..
        } => cmd_predict(fit, covariates_csv, out, cfg),
        Command::McStudy {
            true_params,
            covariates,
            errors,
            n,
            reps,
            out,
            ..
        } => cmd_mc_study(true_params, covariates, errors, n, *reps, out, cfg),
        Command::Diagnose {
            fit, data, out, ..
        } => cmd_diagnose(fit, data, out, cfg),
        Command::Plot {
            kind,
            data,
            fit,
            component,
            size,
            out,
            ..
        } => cmd_plot(*kind, data, fit, *component, *size, out, cfg),
    }
}

fn cmd_simulate(
    params_spec: &str,
    cov_spec: &str,
    err_spec: &str,
    n: usize,
    out: &Path,
    cfg: &RunConfig,
) -> Result<()> {
    let params = parse_params(params_spec)?;
    let covariates = parse_covariates(cov_spec)?;
    let errors = parse_errors(err_spec)?;
    let seed = cfg.fit.seed;
    let cov_points = covariates.sample_pairs(n, seed.derive(1));
    let data = crate::model::simulate_responses(&params, &cov_points, &errors, seed.derive(2))?;
    write_dataset(out, &data, cfg.unit)?;
    let meta = format!(
        "torreg simulate metadata v1\nparams = {params_spec}\ncovariates = {cov_spec}\nerrors = {err_spec}\nn = {n}\nseed = {}\nunit = {}\n",
        seed.0,
        cfg.unit.name()
    );
    std::fs::write(sidecar_path(out, "meta"), meta)?;
    println!("simulate: wrote {n} rows to {}", out.display());
    Ok(())
}

fn cmd_fit(data_path: &Path, out: &Path, cfg: &RunConfig) -> Result<()> {
    let data = load_dataset(data_path, cfg.unit)?;
    let result = fit(&data, &cfg.fit)?;
    let bootstrap = if cfg.bootstrap > 0 {
        Some(bootstrap_se(&data, &cfg.fit, cfg.bootstrap)?)
    } else {
        None
    };
    let text = render_fit_report(
        &result,
        bootstrap.as_ref(),
        data.len(),
        cfg.fit.seed.0,
        cfg.unit.name(),
    );
    std::fs::write(out, text)?;
    println!(
        "fit: loss = {}, report written to {}",
        result.loss,
        out.display()
    );
    Ok(())
}

fn cmd_predict(fit_path: &Path, cov_path: &Path, out: &Path, cfg: &RunConfig) -> Result<()> {
    let (params, _) = parse_fit_report(fit_path)?;
    let (points, labels) = load_covariates(cov_path, cfg.unit)?;
    let predictions: Vec<TorusPoint> = points
        .iter()
        .map(|&p| predict_mean(&params, p))
        .collect::<Result<_>>()?;
    write_predictions(out, &predictions, &labels, cfg.unit)?;
    println!(
        "predict: wrote {} predictions to {}",
        predictions.len(),
        out.display()
    );
    Ok(())
}

fn cmd_mc_study(
    true_params_spec: &str,
    cov_spec: &str,
    error_specs: &[String],
    n_list: &str,
    reps: usize,
    out: &Path,
    cfg: &RunConfig,
) -> Result<()> {
    let true_params = parse_params(true_params_spec)?;
    let covariates = parse_covariates(cov_spec)?;
    let sizes: Vec<usize> = n_list
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad sample size {t:?}")))
        })
        .collect::<Result<_>>()?;
    if sizes.is_empty() {
        return Err(Error::Precondition("at least one sample size required".into()));
    }

    let mut text = format!(
        "{}\ntrue_params = {true_params_spec}\ncovariates = {cov_spec}\nreps = {reps}\nrestarts = {}\nseed = {}\ncell = mean (sd / se)\ncolumns = phi0 b1 b2 b3 b4 theta0\n[rows]\n",
        report::MC_REPORT_HEADER,
        cfg.fit.restarts,
        cfg.fit.seed.0
    );
    let mut row_index = 0u64;
    for &n in &sizes {
        for err_spec in error_specs {
            let errors = parse_errors(err_spec)?;
            let row_config = FitConfig {
                seed: cfg.fit.seed.derive(row_index),
                ..cfg.fit
            };
            let summary =
                monte_carlo_study(&true_params, &covariates, &errors, n, reps, &row_config)?;
            text.push_str(&report::render_mc_row(n, err_spec, &summary));
            row_index += 1;
        }
    }
    std::fs::write(out, text)?;
    println!("mc-study: wrote {} rows to {}", row_index, out.display());
    Ok(())
}

fn signed_residuals(
    params: &ModelParams,
    data: &Dataset,
) -> Result<(Vec<Angle>, Vec<Angle>, Vec<TorusPoint>)> {
    let mut res_phi = Vec::with_capacity(data.len());
    let mut res_theta = Vec::with_capacity(data.len());
    let mut means = Vec::with_capacity(data.len());
    for &(cov, resp) in data.rows() {
        let mean = predict_mean(params, cov)?;
        res_phi.push(Angle::new(resp.phi.radians() - mean.phi.radians()));
        res_theta.push(Angle::new(resp.theta.radians() - mean.theta.radians()));
        means.push(mean);
    }
    Ok((res_phi, res_theta, means))
}

fn diagnostics_section(name: &str, residuals: &[Angle]) -> Result<String> {
    let summary = circular_summary(residuals)?;
    let watson = watson_u2(residuals)?;
    let flag = match crate::diagnostics::vm_mle(residuals)?.flag {
        None => "none",
        Some(VmFitFlag::KappaCapped) => "kappa_capped",
        Some(VmFitFlag::ZeroResultant) => "zero_resultant",
    };
    let mean = match summary.mean_direction {
        Some(a) => format!("{}", a.signed()),
        None => "undefined".to_string(),
    };
    Ok(format!(
        "{name}_residual_mean = {mean}\n\
         {name}_residual_resultant_length = {}\n\
         {name}_residual_circular_sd = {}\n\
         {name}_watson_statistic = {}\n\
         {name}_watson_critical_5pct = {}\n\
         {name}_watson_reject = {}\n\
         {name}_watson_kappa_hat = {}\n\
         {name}_watson_mu_hat = {}\n\
         {name}_fit_flag = {flag}\n",
        summary.resultant_length,
        summary.circular_sd,
        watson.statistic,
        watson.critical_value_5pct,
        watson.reject,
        watson.kappa_hat,
        watson.mu_hat.signed(),
    ))
}

fn sidecar_path(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_diagnose(fit_path: &Path, data_path: &Path, out: &Path, cfg: &RunConfig) -> Result<()> {
    let (params, _) = parse_fit_report(fit_path)?;
    let data = load_dataset(data_path, cfg.unit)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (res_phi, res_theta, means) = signed_residuals(&params, &data)?;

    let mut text = format!("torreg diagnostics report v1\nn = {}\n", data.len());
    text.push_str(&diagnostics_section("phi", &res_phi)?);
    text.push_str(&diagnostics_section("theta", &res_theta)?);

    let observed_phi: Vec<Angle> = data.responses().map(|r| r.phi).collect();
    let observed_theta: Vec<Angle> = data.responses().map(|r| r.theta).collect();
    let predicted_phi: Vec<Angle> = means.iter().map(|m| m.phi).collect();
    let predicted_theta: Vec<Angle> = means.iter().map(|m| m.theta).collect();
    for (name, obs, pred) in [
        ("phi", &observed_phi, &predicted_phi),
        ("theta", &observed_theta, &predicted_theta),
    ] {
        let pairs = qq_pairs(obs, pred)?;
        let mut csv = String::from("observed,predicted\n");
        for (o, p) in &pairs {
            csv.push_str(&format!("{o},{p}\n"));
        }
        let path = sidecar_path(out, &format!("{name}.qq.csv"));
        std::fs::write(&path, csv)?;
        text.push_str(&format!("qq_{name} = {}\n", path.display()));
    }
    std::fs::write(out, text)?;
    println!("diagnose: report written to {}", out.display());
    Ok(())
}

fn cmd_plot(
    kind: PlotKind,
    data_path: &Path,
    fit_path: &Path,
    component: Component,
    size: u32,
    out: &Path,
    cfg: &RunConfig,
) -> Result<()> {
    let (params, _) = parse_fit_report(fit_path)?;
    let data = load_dataset(data_path, cfg.unit)?;
    let mut observed = Vec::with_capacity(data.len());
    let mut predicted = Vec::with_capacity(data.len());
    for &(cov, resp) in data.rows() {
        let mean = predict_mean(&params, cov)?;
        match component {
            Component::Phi => {
                observed.push(resp.phi);
                predicted.push(mean.phi);
            }
            Component::Theta => {
                observed.push(resp.theta);
                predicted.push(mean.theta);
            }
        }
    }
    let doc = match kind {
        PlotKind::CircularScatter => {
            // predicted drawn last so it sits on top where the two overlap
            let series = [
                PlotSeries::new("observed", observed, Marker::Circle, "#1f5fa8")?,
                PlotSeries::new("predicted", predicted, Marker::Cross, "#c23b22")?,
            ];
            circular_scatter_svg(&series, size)?
        }
        PlotKind::Spoke => spoke_plot_svg(&observed, &predicted, size)?,
        PlotKind::Qq => {
            let pairs = qq_pairs(&observed, &predicted)?;
            qq_plot_svg(&pairs, size)?
        }
    };
    std::fs::write(out, doc.xml())?;
    println!("plot: wrote {}", out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_error_space() {
        assert_eq!(exit_code_for(&Error::Parse("x".into())), 3);
        assert_eq!(
            exit_code_for(&Error::Io(std::io::Error::other("x"))),
            3
        );
        assert_eq!(exit_code_for(&Error::TooFewRows { n: 1, min: 3 }), 4);
        assert_eq!(exit_code_for(&Error::EmptyDataset), 4);
        assert_eq!(exit_code_for(&Error::EstimationFailed("x".into())), 5);
    }

    #[test]
    fn config_file_applies_and_flags_win() {
        let dir = std::env::temp_dir().join("torreg-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(
            &path,
            "# comment\nrestarts = 5\nseed = 9\nradius_major = 3\nradius_minor = 1.5\nunit = radians\n",
        )
        .unwrap();
        let opts = CommonOpts {
            config: Some(path.clone()),
            restarts: Some(7),
            ..CommonOpts::default()
        };
        let cfg = resolve(&opts).unwrap();
        assert_eq!(cfg.fit.restarts, 7); // flag beats file
        assert_eq!(cfg.fit.seed, RngSeed(9));
        assert_eq!(cfg.fit.geometry.major_radius(), 3.0);
        assert_eq!(cfg.unit, AngleUnit::Radians);

        std::fs::write(&path, "unknown_key = 1\n").unwrap();
        let opts = CommonOpts {
            config: Some(path),
            ..CommonOpts::default()
        };
        assert!(resolve(&opts).is_err());
    }

    #[test]
    fn spindle_geometry_rejected_at_resolution() {
        let opts = CommonOpts {
            radius_major: Some(1.0),
            radius_minor: Some(2.0),
            ..CommonOpts::default()
        };
        assert!(resolve(&opts).is_err());
    }
}
