//! Command-line front end: `solve`, `oracle` and `open-question`.
//!
//! Exit codes: 0 success, 1 configuration or runtime error, 2 iteration
//! stopped at `max_iters`, 3 monotone-product abort.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::eigen_iteration::{
    init_u0, iterate, open_question_experiment, OpenQuestionReport, ORACLE_PROFILE_RES,
};
use crate::error::{Error, Result};
use crate::geometry::{build_domain, DensitySpec, DomainSpec};
use crate::oracles::{oracle_for, shooting_eigenpair, OracleEigenpair, OracleMethod};

pub use config::{Format, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_MAX_ITERS: u8 = 2;
pub const EXIT_MONOTONE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mongeampere",
    version,
    about = "First Dirichlet eigenpair of the complex Monge-Ampere operator on a ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the inverse iteration and write history, eigenfunction and summary.
    Solve(RunArgs),
    /// Write the oracle eigenpair, optionally compared with an earlier solve.
    Oracle(RunArgs),
    /// Iterate from (dd^c u0)^n = f dV and compare the limit with the normalized eigenfunction.
    OpenQuestion(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub lambda1_est: f64,
    pub final_rayleigh: f64,
    pub converged: bool,
    pub iterations: usize,
    pub domain: DomainSpec,
    pub density: DensitySpec,
    /// Not part of the result; see the README.
    pub advisory: Advisory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advisory {
    pub lambda1_aitken: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub lambda1: f64,
    pub method: OracleMethod,
    pub ode_res: Option<usize>,
    pub profile_res: usize,
    pub domain: DomainSpec,
    pub density: DensitySpec,
    pub comparison: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub source: String,
    pub lambda1_est: f64,
    pub lambda_rel_error: f64,
    /// Least-squares factor `a` minimizing `Σ (u_i - a w_i)^2`.
    pub scale: f64,
    /// `‖u - a w‖_∞ / ‖u‖_∞`.
    pub rel_sup_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenQuestionSummary {
    pub lambda1_est: f64,
    pub lambda1_oracle: f64,
    pub lambda_rel_error: f64,
    pub rel_sup_distance: f64,
    pub ordering_violations: usize,
    pub tol_cmp: f64,
    pub converged: bool,
    pub iterations: usize,
    pub domain: DomainSpec,
    pub density: DensitySpec,
}

struct Context {
    cfg: RunConfig,
    out: PathBuf,
    quiet: bool,
}

impl Context {
    fn new(args: &RunArgs) -> Result<Self> {
        let cfg = RunConfig::load(&args.config)?;
        let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        fs::create_dir_all(&out).map_err(|source| Error::Io {
            path: out.display().to_string(),
            source,
        })?;
        Ok(Self {
            cfg,
            out,
            quiet: args.quiet,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let (args, cmd): (&RunArgs, fn(&Context) -> Result<u8>) = match &cli.command {
        Command::Solve(a) => (a, cmd_solve),
        Command::Oracle(a) => (a, cmd_oracle),
        Command::OpenQuestion(a) => (a, cmd_open_question),
    };
    let ctx = match Context::new(args) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match cmd(&ctx) {
        Ok(code) => code,
        Err(e @ Error::MonotoneProductViolated { .. }) => {
            eprintln!("error: {e}");
            if let Err(dump) = write_monotone_dump(&ctx, &e) {
                eprintln!("error: could not write diagnostic dump: {dump}");
            }
            EXIT_MONOTONE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_monotone_dump(ctx: &Context, err: &Error) -> Result<()> {
    let Error::MonotoneProductViolated {
        k,
        previous,
        next,
        history,
    } = err
    else {
        return Ok(());
    };
    output::write_text(&ctx.path("history.csv"), &output::history_csv(history))?;
    let dump = serde_json::json!({
        "error": err.to_string(),
        "k": k,
        "m_k": previous,
        "m_k_plus_1": next,
        "relative_increase": next / previous - 1.0,
        "tol_mono": ctx.cfg.iteration.tol_mono,
        "history": history,
    });
    output::write_json(&ctx.path("diagnostic.json"), &dump)
}

fn cmd_solve(ctx: &Context) -> Result<u8> {
    let cfg = &ctx.cfg;
    let domain = build_domain(&cfg.domain)?;
    let u0 = init_u0(&domain, &cfg.density, cfg.init, &cfg.solver)?;
    let result = iterate(u0, &cfg.density, &cfg.solver, &cfg.iteration)?;

    if cfg.wants(Format::Csv) {
        output::write_text(
            &ctx.path("history.csv"),
            &output::history_csv(&result.history),
        )?;
        output::write_text(
            &ctx.path("eigenfunction.csv"),
            &output::field_csv(&result.eigenfunction),
        )?;
    }
    if cfg.wants(Format::Gnuplot) {
        output::write_text(
            &ctx.path("history.dat"),
            &output::history_dat(&result.history),
        )?;
        output::write_text(
            &ctx.path("eigenfunction.dat"),
            &output::field_dat(&result.eigenfunction),
        )?;
    }
    let summary = SolveSummary {
        lambda1_est: result.lambda1_est,
        final_rayleigh: result.final_rayleigh(),
        converged: result.converged,
        iterations: result.iterations_used,
        domain: cfg.domain.clone(),
        density: cfg.density.clone(),
        advisory: Advisory {
            lambda1_aitken: result.lambda1_extrapolated,
        },
    };
    if cfg.wants(Format::Json) {
        output::write_json(&ctx.path("summary.json"), &summary)?;
    }
    ctx.say(format!(
        "lambda1_est = {}  converged = {}  iterations = {}",
        output::num(summary.lambda1_est),
        summary.converged,
        summary.iterations
    ));
    Ok(if result.converged {
        EXIT_OK
    } else {
        EXIT_MAX_ITERS
    })
}

fn oracle(cfg: &RunConfig) -> Result<(OracleEigenpair, usize)> {
    match cfg.ode_res {
        Some(ode_res) if !matches!((cfg.domain.n, &cfg.density), (1, DensitySpec::Constant(_))) => {
            let profile_res = ode_res / 4;
            let radial = DomainSpec::radial(cfg.domain.n, cfg.domain.radius, profile_res);
            Ok((
                shooting_eigenpair(&radial, &cfg.density, ode_res, None)?,
                profile_res,
            ))
        }
        _ => Ok((
            oracle_for(&cfg.domain, &cfg.density, ORACLE_PROFILE_RES)?,
            ORACLE_PROFILE_RES,
        )),
    }
}

fn compare(dir: &Path, pair: &OracleEigenpair, radius: f64) -> Result<Comparison> {
    let summary_path = dir.join("summary.json");
    let text = output::read_text(&summary_path)?;
    let summary: SolveSummary = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: summary_path.display().to_string(),
        message: e.to_string(),
    })?;
    let (s, u) = output::read_profile_samples(&dir.join("eigenfunction.csv"))?;
    let r2 = radius * radius;
    if let Some(bad) = s.iter().find(|&&s| s > r2 * (1.0 + 1e-9)) {
        return Err(Error::InvalidParameter(format!(
            "compared eigenfunction has a node at |z|^2 = {bad}, outside the configured ball"
        )));
    }
    let w: Vec<f64> = s.iter().map(|&s| pair.eval(s)).collect();
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let uw: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
    let scale = uw / ww;
    let sup_u = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = u
        .iter()
        .zip(&w)
        .fold(0.0f64, |m, (a, b)| m.max((a - scale * b).abs()));
    Ok(Comparison {
        source: dir.display().to_string(),
        lambda1_est: summary.lambda1_est,
        lambda_rel_error: (summary.lambda1_est - pair.lambda1).abs() / pair.lambda1,
        scale,
        rel_sup_error: err / sup_u,
    })
}

fn cmd_oracle(ctx: &Context) -> Result<u8> {
    let cfg = &ctx.cfg;
    let (pair, profile_res) = oracle(cfg)?;
    let comparison = match &cfg.compare_dir {
        Some(dir) => Some(compare(dir, &pair, cfg.domain.radius)?),
        None => None,
    };
    if cfg.wants(Format::Csv) {
        output::write_text(
            &ctx.path("oracle_profile.csv"),
            &output::field_csv(&pair.profile),
        )?;
    }
    if cfg.wants(Format::Gnuplot) {
        output::write_text(
            &ctx.path("oracle_profile.dat"),
            &output::field_dat(&pair.profile),
        )?;
    }
    let summary = OracleSummary {
        lambda1: pair.lambda1,
        method: pair.method,
        ode_res: pair.ode_res,
        profile_res,
        domain: cfg.domain.clone(),
        density: cfg.density.clone(),
        comparison,
    };
    if cfg.wants(Format::Json) {
        output::write_json(&ctx.path("oracle.json"), &summary)?;
    }
    ctx.say(format!(
        "lambda1 = {}  ({})",
        output::num(pair.lambda1),
        pair.method.as_str()
    ));
    if let Some(c) = &summary.comparison {
        ctx.say(format!(
            "vs {}: lambda relative error {:.3e}, eigenfunction relative sup error {:.3e}",
            c.source, c.lambda_rel_error, c.rel_sup_error
        ));
    }
    Ok(EXIT_OK)
}

fn cmd_open_question(ctx: &Context) -> Result<u8> {
    let cfg = &ctx.cfg;
    let domain = build_domain(&cfg.domain)?;
    let report: OpenQuestionReport = open_question_experiment(
        &domain,
        &cfg.density,
        &cfg.solver,
        &cfg.iteration,
        cfg.tol_cmp,
    )?;
    let diff: Vec<f64> = report
        .phi
        .values()
        .iter()
        .zip(report.w.values())
        .map(|(a, b)| a - b)
        .collect();
    let columns: [(&str, &[f64]); 3] = [
        ("phi", report.phi.values()),
        ("w", report.w.values()),
        ("diff", &diff),
    ];
    if cfg.wants(Format::Csv) {
        output::write_text(
            &ctx.path("openq.csv"),
            &output::fields_csv(&columns, &domain),
        )?;
    }
    if cfg.wants(Format::Gnuplot) {
        output::write_text(
            &ctx.path("openq.dat"),
            &output::fields_dat(&columns, &domain),
        )?;
    }
    let summary = OpenQuestionSummary {
        lambda1_est: report.lambda1_est,
        lambda1_oracle: report.lambda1_oracle,
        lambda_rel_error: report.lambda_rel_error,
        rel_sup_distance: report.rel_sup_distance,
        ordering_violations: report.ordering_violations,
        tol_cmp: report.tol_cmp,
        converged: report.converged,
        iterations: report.iterations,
        domain: cfg.domain.clone(),
        density: cfg.density.clone(),
    };
    if cfg.wants(Format::Json) {
        output::write_json(&ctx.path("openq.json"), &summary)?;
    }
    ctx.say(format!(
        "|phi - w|/|w| = {:.6e}  ordering violations = {}  lambda1_est = {}",
        summary.rel_sup_distance,
        summary.ordering_violations,
        output::num(summary.lambda1_est)
    ));
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_MAX_ITERS
    })
}
