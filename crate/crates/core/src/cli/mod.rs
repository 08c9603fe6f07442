//! Config-driven experiment runner behind the `dpcalc` binary.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{CheckReport, GridPoint};
use crate::measures::{BaseMeasure, Functional, ShapeMeasure};
use crate::rng::RngStream;
use crate::samplers::{BetaGammaSampler, DirichletSampler, MixtureSampler};
use crate::transforms::{
    cs_eq15, cs_eq17, cs_partition_expansion, eq11_rhs, gamma_identity_check, laplace_gamma, psi,
    ExpansionMode,
};
use crate::{mc, DEFAULT_EPS, DEFAULT_QUAD_ORDER};

pub use crate::identities::list_checks;
pub use config::{parse_config, parse_config_with, ConfiguredCheck, Overrides, RunConfig};

/// Exit status when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for usage, config and I/O errors.
pub const EXIT_ERROR: i32 = 2;

/// Runs one configured check, turning a runtime error into a failed report.
pub fn run_check(check: &ConfiguredCheck, timings: bool) -> CheckReport {
    let start = Instant::now();
    let mut report = match (check.spec.run)(&check.params) {
        Ok(r) => r,
        Err(e) => CheckReport::new(check.spec.name, check.params.clone(), Vec::<GridPoint>::new())
            .with_note(format!("error: {e}")),
    };
    if report.points.is_empty() {
        report.pass = false;
    }
    if timings {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

/// Executes every check in config order, writing one JSON line per check.
/// Returns whether all checks passed.
pub fn run<W: Write>(config: &RunConfig, out: &mut W, timings: bool) -> Result<bool> {
    let mut all = true;
    for check in &config.checks {
        let report = run_check(check, timings);
        all &= report.pass;
        let mut line = serde_json::to_string(&report)
            .map_err(|e| Error::InvalidParameter(format!("report serialization: {e}")))?;
        line.push('\n');
        out.write_all(line.as_bytes())?;
        out.flush()?;
    }
    Ok(all)
}

#[derive(Debug, Parser)]
#[command(
    name = "dpcalc",
    version,
    about = "Simulate and verify transforms of Dirichlet-type random measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks listed in a TOML config and write JSONL reports.
    Run(RunArgs),
    /// List the registered checks.
    List,
    /// Dump raw functional draws, one per line.
    Sample(SampleArgs),
    /// Evaluate one closed form and print it as JSON.
    Transform(TransformArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file.
    pub config: PathBuf,
    /// Root seed; overrides the config's `seed`.
    #[arg(long, env = "DPCALC_SEED")]
    pub seed: Option<u64>,
    /// Report file; defaults to the config's `out`, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Default Monte Carlo sample size.
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Default Gauss-Jacobi order.
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Record wall-clock duration per check (reports are then not reproducible byte for byte).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Process {
    /// `P(g)` for `P ~ Dirichlet(θH)`.
    Dirichlet,
    /// `μ(g)` for the Gamma process with shape `θH`.
    Gamma,
    /// `μ(g)` for the Beta-Gamma process with shape `θH` and parameter `d`.
    BetaGamma,
    /// `U_{q,θ+n-q}(T_θ P(g) + Σ G_j g(Y*_j))`.
    Mixture,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Base measure, e.g. `uniform(0,1)` or `0.5*delta(0)+0.5*delta(1)`.
    #[arg(long, default_value = "uniform(0,1)")]
    pub base: String,
    /// Functional, e.g. `id` or `indicator(0.5,1.5)`.
    #[arg(long, default_value = "id")]
    pub functional: String,
}

impl MeasureArgs {
    fn build(&self) -> Result<(ShapeMeasure, Functional)> {
        let base: BaseMeasure = self.base.parse()?;
        Ok((ShapeMeasure::new(self.theta, base)?, self.functional.parse()?))
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub process: Process,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Number of draws.
    #[arg(long, default_value_t = 1000)]
    pub n_samples: usize,
    #[arg(long, env = "DPCALC_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Beta-Gamma parameter.
    #[arg(long, default_value_t = 0.0)]
    pub d: f64,
    /// Mixture order.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Mixture depth.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransformKind {
    /// `θ E_H[ln(1 + z g)]`.
    Psi,
    /// `exp(-psi(z))`.
    Laplace,
    /// Beta(q, θ-q) mixture form of the order-q transform.
    CsEq15,
    /// Order-one transform.
    CsEq17,
    /// Exact partition expansion of the order-q transform at depth n.
    Expansion,
    /// Joint Laplace transform of `(T, μ(g))` at `(v, w)`.
    Eq11,
    /// Relative error of the Gamma-variable identity at `(t, q)`.
    GammaIdentity,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(value_enum)]
    pub kind: TransformKind,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub v: f64,
    #[arg(long, default_value_t = 0.0)]
    pub w: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
}

#[derive(Serialize)]
struct TransformRecord<'a> {
    transform: &'a str,
    value: f64,
}

fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_run(args: &RunArgs) -> Result<bool> {
    if let Some(j) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("--jobs: {e}")))?;
    }
    let text = std::fs::read_to_string(&args.config)?;
    let overrides = Overrides {
        seed: args.seed,
        n_samples: args.n_samples,
        quad_order: args.quad_order,
    };
    let config = parse_config_with(&text, &overrides)?;
    let path = args.out.as_ref().or(config.out.as_ref());
    let mut out = open_out(path)?;
    let pass = run(&config, &mut out, args.timings)?;
    out.flush()?;
    Ok(pass)
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let (shape, g) = args.measure.build()?;
    let stream = RngStream::new(args.seed);
    let xs = match args.process {
        Process::Dirichlet => {
            let s = DirichletSampler::new(&shape, args.eps)?;
            mc::draws(args.n_samples, &stream, |rng| s.functional(rng, &g))
        }
        Process::Gamma | Process::BetaGamma => {
            let d = if matches!(args.process, Process::Gamma) {
                0.0
            } else {
                args.d
            };
            let s = BetaGammaSampler::new(&shape, d, args.eps)?;
            mc::draws(args.n_samples, &stream, |rng| s.functional(rng, &g))
        }
        Process::Mixture => {
            let s = MixtureSampler::new(&shape, args.q, args.n, args.eps)?;
            mc::draws(args.n_samples, &stream, |rng| s.draw(rng, &g))
        }
    };
    let mut out = open_out(None)?;
    for x in xs {
        writeln!(out, "{x:e}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let (shape, g) = args.measure.build()?;
    let m = args.quad_order;
    let (name, value) = match args.kind {
        TransformKind::Psi => ("psi", psi(&shape, &g, args.z)?),
        TransformKind::Laplace => ("laplace", laplace_gamma(&shape, &g, args.z)?),
        TransformKind::CsEq15 => ("cs_eq15", cs_eq15(&shape, &g, args.z, args.q, m)?),
        TransformKind::CsEq17 => ("cs_eq17", cs_eq17(&shape, &g, args.z, m)?),
        TransformKind::Expansion => {
            let est = cs_partition_expansion(&shape, &g, args.z, args.q, args.n, &ExpansionMode::Exact, m)?;
            ("expansion", est.mean)
        }
        TransformKind::Eq11 => ("eq11", eq11_rhs(&shape, &g, args.v, args.w)?),
        TransformKind::GammaIdentity => ("gamma_identity", gamma_identity_check(args.t, args.q)?),
    };
    let record = TransformRecord {
        transform: name,
        value,
    };
    println!("{}", serde_json::to_string(&record).expect("plain record"));
    Ok(())
}

/// Parses arguments, dispatches, and returns the process exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|pass| if pass { EXIT_PASS } else { EXIT_FAIL }),
        Command::List => {
            print!("{}", list_checks());
            Ok(EXIT_PASS)
        }
        Command::Sample(args) => cmd_sample(args).map(|_| EXIT_PASS),
        Command::Transform(args) => cmd_transform(args).map(|_| EXIT_PASS),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dpcalc: {e}");
            EXIT_ERROR
        }
    }
}
