use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use osserman_lab::clifford::{self, CliffordSystem};
use osserman_lab::conformal;
use osserman_lab::curvature::{self, CurvTensor};
use osserman_lab::geodiff::{self, ChartSpec, FDConfig};
use osserman_lab::json::{self, TensorDocument};
use osserman_lab::numkit::{random_symmetric, SymOp, TolerancePolicy};
use osserman_lab::octonion;
use osserman_lab::verify;
use osserman_lab::LabError;

const THREADS_ENV: &str = "OSSERMAN_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Command outcome: the text to emit and whether the verification passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn json<T: Serialize>(value: &T) -> Result<Self, CliError> {
        Ok(Outcome { text: json::to_string(value)?, passed: true })
    }

    fn verdict<T: Serialize>(value: &T, passed: bool) -> Result<Self, CliError> {
        Ok(Outcome { text: json::to_string(value)?, passed })
    }
}

#[derive(Parser)]
#[command(name = "osserman-lab", version, about = "Osserman curvature-algebra verification lab")]
struct Cli {
    /// Output file (stdout when absent).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radon–Hurwitz number of n.
    Radon {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Clifford systems.
    #[command(subcommand)]
    Cliff(CliffCmd),
    /// Algebraic curvature tensors.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Octonion arithmetic.
    #[command(subcommand)]
    Oct(OctCmd),
    /// Conformal deformations of the rank-one models.
    #[command(subcommand)]
    Conformal(ConformalCmd),
    /// Finite-difference geometry on model charts.
    #[command(subcommand)]
    Chart(ChartCmd),
    /// Acceptance runs.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum CliffCmd {
    /// Generate and validate a Clifford system.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        nu: usize,
        /// Random orthogonal conjugation seed; canonical generators when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda0: f64,
        /// Comma-separated ηᵢ; all 1 when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eta: Vec<f64>,
    },
    /// Extend a system on R^8 to seven structures.
    Extend8 {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        xi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validation report of a system.
    Validate {
        #[arg(short, long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TensorKind {
    Clifford,
    Confcs,
    Model,
    Constcurv,
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Build a curvature tensor.
    Make {
        #[arg(long, value_enum)]
        kind: TensorKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        nu: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda0: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        /// Diagonal of ρ for `confcs`; a seeded random ρ when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        rho: Vec<f64>,
        /// Clifford system JSON to use instead of generating one.
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Osserman check of a tensor.
    Osserman {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Weyl tensor.
    Weyl {
        #[arg(short, long)]
        input: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OctCmd {
    /// Randomized identity suite.
    Check {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Signed basis-product table.
    Table,
}

#[derive(Subcommand)]
enum ConformalCmd {
    /// Residuals of the conformal invariants.
    Verify {
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ChartCmd {
    /// Jacobi spectra of R and W over seeded points.
    Scan {
        /// Short name (sphere4, cp2, ch2, euclidean5) or a chart-spec JSON file.
        #[arg(long)]
        chart: String,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        directions: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        richardson: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Every acceptance criterion; exit code 0 iff all pass.
    All {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    let mut s = String::new();
    match path.filter(|p| p.as_os_str() != "-") {
        Some(p) => {
            s = std::fs::read_to_string(p).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io { path: "<stdin>".into(), source: e })?;
        }
    }
    Ok(s)
}

fn read_system(path: Option<&PathBuf>) -> Result<CliffordSystem, CliError> {
    Ok(json::from_str(&read_input(path)?)?)
}

fn read_tensor(path: Option<&PathBuf>) -> Result<(CurvTensor, Option<CliffordSystem>), CliError> {
    let doc: TensorDocument = json::from_str(&read_input(path)?)?;
    Ok((doc.tensor()?, doc.system))
}

fn default_eta(eta: Vec<f64>, nu: usize) -> Vec<f64> {
    if eta.is_empty() {
        vec![1.0; nu]
    } else {
        eta
    }
}

fn run(cmd: Command, policy: &TolerancePolicy) -> Result<Outcome, CliError> {
    match cmd {
        Command::Radon { n } => Ok(Outcome { text: format!("{}\n", clifford::radon_bound(n as usize)), passed: true }),
        Command::Cliff(c) => match c {
            CliffCmd::Gen { n, nu, seed, lambda0, eta } => {
                Outcome::json(&clifford::generate(n, nu, lambda0, &default_eta(eta, nu), seed)?)
            }
            CliffCmd::Extend8 { input, xi, seed } => {
                let sys = read_system(input.as_ref())?;
                Outcome::json(&clifford::extend_to_seven(&sys, xi, seed, policy)?)
            }
            CliffCmd::Validate { input } => {
                let r = clifford::validate(&read_system(input.as_ref())?, policy);
                Outcome::verdict(&r, r.passed)
            }
        },
        Command::Tensor(c) => match c {
            TensorCmd::Make { kind, n, nu, seed, lambda0, eta, eps, rho, system } => {
                let need_n = || n.ok_or_else(|| CliError::Usage("--n is required".into()));
                let sys = match &system {
                    Some(p) => Some(read_system(Some(p))?),
                    None => None,
                };
                let make_sys = |lambda0: f64, eta: Vec<f64>| -> Result<CliffordSystem, CliError> {
                    match &sys {
                        Some(s) => Ok(s.with_constants(lambda0, eta)?),
                        None => Ok(clifford::generate(need_n()?, nu, lambda0, &eta, seed)?),
                    }
                };
                let nu_eff = sys.as_ref().map_or(nu, |s| s.nu());
                let (t, s) = match kind {
                    TensorKind::Constcurv => (curvature::constant_curvature(need_n()?, lambda0), None),
                    TensorKind::Clifford => {
                        let s = make_sys(lambda0, default_eta(eta, nu_eff))?;
                        (curvature::from_clifford(&s), Some(s))
                    }
                    TensorKind::Model => {
                        let s = make_sys(eps, vec![eps; nu_eff])?;
                        (curvature::model_tensor(&s, eps)?, Some(s))
                    }
                    TensorKind::Confcs => {
                        let s = make_sys(lambda0, default_eta(eta, nu_eff))?;
                        let r = if rho.is_empty() {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
                            random_symmetric(&mut rng, s.n())
                        } else {
                            SymOp::diag(&rho)
                        };
                        (curvature::from_confcs(&r, &s)?, Some(s))
                    }
                };
                Outcome::json(&TensorDocument::new(&t, s))
            }
            TensorCmd::Osserman { input, samples, seed } => {
                let (t, s) = read_tensor(input.as_ref())?;
                Outcome::json(&curvature::osserman_check(&t, samples, seed, s.as_ref(), policy)?)
            }
            TensorCmd::Weyl { input } => {
                let (t, _) = read_tensor(input.as_ref())?;
                Outcome::json(&TensorDocument::new(&curvature::weyl(&t)?, None))
            }
        },
        Command::Oct(c) => match c {
            OctCmd::Check { trials, seed } => {
                let r = octonion::identity_suite(trials, seed);
                let passed = r.max_residual < verify::thresholds::OCTONION_IDENTITY;
                Outcome::verdict(&r, passed)
            }
            OctCmd::Table => Outcome::json(&octonion::table_dump()),
        },
        Command::Conformal(ConformalCmd::Verify { nu, n, eps, seed }) => {
            let r = conformal::conformal_verify(nu, n, eps, seed, policy)?;
            Outcome::verdict(&r, r.passed)
        }
        Command::Chart(ChartCmd::Scan { chart, points, directions, step, richardson, seed }) => {
            let spec = if chart.ends_with(".json") {
                json::from_str::<ChartSpec>(&read_input(Some(&PathBuf::from(&chart)))?)?
            } else {
                ChartSpec::from_short_name(&chart)?
            };
            let chart = spec.to_chart()?;
            let cfg = FDConfig { h: step, richardson, ..FDConfig::default() };
            let pts = geodiff::sample_points(&chart, points, seed);
            Outcome::json(&geodiff::osserman_scan(&chart, &pts, directions, seed, &cfg, policy)?)
        }
        Command::Verify(VerifyCmd::All { seed }) => {
            let r = verify::run_all(seed, policy, thread_cap())?;
            for c in &r.criteria {
                eprintln!("{}", c.summary());
            }
            Outcome::verdict(&r, r.passed)
        }
    }
}

fn thread_cap() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output.filter(|p| p.as_os_str() != "-") {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io { path: p.display().to_string(), source: e }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = thread_cap();
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let policy = TolerancePolicy::default();
    let result = run(cli.command, &policy).and_then(|o| emit(&o.text, cli.output.as_ref()).map(|_| o.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
