mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use blaschke_lab::approx::{LiftStrategy, PipelineOptions, DEFAULT_DEG_CAP, DEFAULT_N_CAP};
use blaschke_lab::orlicz::DEFAULT_REL_TOL;
use blaschke_lab::{CensusOptions, CoeffOptions, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "blaschke-lab",
    version,
    about = "Coefficients of Blaschke product powers, Orlicz norms and simultaneous approximation"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Tolerances, caps and output settings shared by every subcommand.
#[derive(Args)]
pub struct RunConfig {
    /// Aliasing tolerance of coefficient computations.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative tolerance of Luxemburg norm bisection.
    #[arg(long, global = true, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    /// Angular accuracy of phase census zeros.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_xi: f64,
    /// Relative threshold for vanishing phase derivatives.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_mult: f64,
    /// Largest FFT grid.
    #[arg(long, global = true, default_value_t = 1 << 26)]
    pub m_cap: usize,
    /// Largest polynomial degree of arc fits.
    #[arg(long, global = true, default_value_t = DEFAULT_DEG_CAP)]
    pub deg_cap: usize,
    /// Largest power index searched.
    #[arg(long, global = true, default_value_t = DEFAULT_N_CAP)]
    pub n_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed of the validator's random grid.
    #[arg(long, global = true, default_value_t = PipelineOptions::default().seed)]
    pub seed: u64,
}

impl RunConfig {
    fn check(&self) -> Result<(), Error> {
        for (name, v) in [
            ("tol", self.tol),
            ("rel-tol", self.rel_tol),
            ("tol-xi", self.tol_xi),
            ("tol-mult", self.tol_mult),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Configuration(format!("--{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("m-cap", self.m_cap), ("deg-cap", self.deg_cap), ("n-cap", self.n_cap)] {
            if v == 0 {
                return Err(Error::Configuration(format!("--{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn coeff(&self) -> CoeffOptions {
        CoeffOptions {
            tol: self.tol,
            m_cap: self.m_cap,
        }
    }

    pub fn census(&self) -> CensusOptions {
        CensusOptions {
            tol_xi: self.tol_xi,
            tol_mult: self.tol_mult,
            ..Default::default()
        }
    }

    pub fn pipeline(&self, lift: LiftStrategy, points: usize) -> PipelineOptions {
        PipelineOptions {
            coeff: self.coeff(),
            rel_tol: self.rel_tol,
            deg_cap: self.deg_cap,
            n_cap: self.n_cap,
            lift,
            seed: self.seed,
            validator_points: points,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Taylor coefficients of B^k.
    Coeffs {
        /// Comma separated zeros, e.g. `0,0.5,0.3+0.4i`.
        #[arg(long)]
        zeros: String,
        #[arg(long)]
        k: usize,
    },
    /// Norms of B^k over a range of k.
    Sweep {
        #[arg(long)]
        zeros: String,
        /// `power:<p>` or `quadlog:<a>`.
        #[arg(long, conflicts_with = "norm")]
        orlicz: Option<String>,
        /// `sup`, `l1` or `l2`.
        #[arg(long)]
        norm: Option<String>,
        /// `lo:hi:dyadic` or a comma separated list.
        #[arg(long)]
        ks: String,
    },
    /// Log-log decay fit of a sweep file.
    Rate {
        /// Sweep CSV written by `sweep`.
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
    },
    /// Van der Corput bound on the coefficients of B^k.
    Bound {
        #[arg(long)]
        zeros: String,
        #[arg(long)]
        k: usize,
        /// Comma separated epsilon grid.
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Runs the approximation pipeline on a request file and writes a certificate.
    Approx {
        #[arg(long)]
        request: PathBuf,
        #[arg(long, value_parser = parse_lift, default_value = "direct")]
        lift: LiftStrategy,
        #[arg(long, default_value_t = 100_000)]
        points: usize,
    },
    /// Chains approximation blocks for several targets.
    Universal {
        #[arg(long)]
        request: PathBuf,
        #[arg(long, value_parser = parse_lift, default_value = "auto")]
        lift: LiftStrategy,
        #[arg(long, default_value_t = 100_000)]
        points: usize,
    },
    /// Re-checks a certificate from its raw data.
    #[command(hide = true)]
    Validate {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        points: usize,
    },
}

fn parse_lift(s: &str) -> Result<LiftStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("BLASCHKE_LAB_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Configuration(format!("BLASCHKE_LAB_THREADS must be a positive integer, got `{v}`"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    cli.config.check()?;
    let cfg = &cli.config;
    match cli.command {
        Command::Coeffs { zeros, k } => commands::coeffs(cfg, &zeros, k),
        Command::Sweep {
            zeros,
            orlicz,
            norm,
            ks,
        } => commands::sweep(cfg, &zeros, orlicz.or(norm).as_deref(), &ks),
        Command::Rate { sweep, kmin } => commands::rate(cfg, &sweep, kmin),
        Command::Bound { zeros, k, eps_grid } => commands::bound(cfg, &zeros, k, eps_grid.as_deref()),
        Command::Approx { request, lift, points } => commands::approx(cfg, &request, lift, points),
        Command::Universal { request, lift, points } => commands::universal(cfg, &request, lift, points),
        Command::Validate { certificate, points } => commands::validate(cfg, &certificate, points),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut message = String::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !message.contains(&cause) {
                    if !message.is_empty() {
                        message.push_str(": ");
                    }
                    message.push_str(&cause);
                }
            }
            eprintln!("error: {message}");
            let code = e
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .map_or(1, |e| e.class().exit_code());
            ExitCode::from(code as u8)
        }
    }
}
