use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use blaschke_lab::approx::{run_pipeline, universal_partial_sums_demo, validate_certificate, LiftStrategy};
use blaschke_lab::asymptotics::{
    default_epsilon_grid, fit_decay_exponent, norm_sweep, parse_k_range, vdc_bound, NormSweep, SweepOptions,
};
use blaschke_lab::coefficients::coeffs_of_power;
use blaschke_lab::{
    ApproxCertificate, ApproxRequest, BlaschkeProduct, Complex64, Error, NormKind, OrliczFunction, TargetFunction,
};
use serde::{Deserialize, Serialize};

use crate::{Format, RunConfig};

/// Parses `0,0.5,0.3+0.4i` into a product.
pub fn parse_zeros(s: &str) -> Result<BlaschkeProduct, Error> {
    let zeros = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<Complex64>()
                .map_err(|_| Error::Validation(format!("cannot parse zero `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    BlaschkeProduct::new(zeros)
}

fn with_output(cfg: &RunConfig, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(cfg: &RunConfig, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    with_output(cfg, |w| writeln!(w, "{text}"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
        .map_err(Into::into)
}

fn zeros_label(b: &BlaschkeProduct) -> String {
    let zeros: Vec<String> = b.zeros().iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    zeros.join(" ")
}

pub fn coeffs(cfg: &RunConfig, zeros: &str, k: usize) -> anyhow::Result<()> {
    let b = parse_zeros(zeros)?;
    let s = coeffs_of_power(&b, k, &cfg.coeff())?;
    match cfg.format {
        Format::Json => write_json(cfg, &s),
        Format::Csv => {
            let comments = [
                format!("zeros = {}", zeros_label(&b)),
                format!("k = {k}"),
                format!("tol = {:e}", cfg.tol),
            ];
            with_output(cfg, |w| s.write_csv(w, &comments))
        }
    }
}

pub fn sweep(cfg: &RunConfig, zeros: &str, norm: Option<&str>, ks: &str) -> anyhow::Result<()> {
    let b = parse_zeros(zeros)?;
    let kind: NormKind = norm
        .ok_or_else(|| Error::Validation("one of --orlicz or --norm is required".into()))?
        .parse()?;
    let ks = parse_k_range(ks)?;
    let opts = SweepOptions {
        coeff: cfg.coeff(),
        rel_tol: cfg.rel_tol,
    };
    let sweep = norm_sweep(&b, &kind, &ks, &opts)?;
    match cfg.format {
        Format::Json => write_json(cfg, &sweep),
        Format::Csv => with_output(cfg, |w| sweep.write_csv(w)),
    }
}

#[derive(Serialize)]
struct RateReport {
    norm: String,
    k_min: usize,
    points: usize,
    slope: f64,
    stderr: f64,
    intercept: f64,
    predicted_exponent: Option<f64>,
}

pub fn rate(cfg: &RunConfig, path: &Path, k_min: usize) -> anyhow::Result<()> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let sweep = NormSweep::read_csv(BufReader::new(file))?;
    let fit = fit_decay_exponent(&sweep, k_min)?;
    let predicted = match (&sweep.blaschke, sweep.norm_kind.as_str()) {
        (Some(b), "sup") => Some(b.phase_census(&cfg.census())?.decay_exponent()),
        _ => None,
    };
    let report = RateReport {
        norm: sweep.norm_kind.clone(),
        k_min,
        points: fit.points,
        slope: fit.slope,
        stderr: fit.stderr,
        intercept: fit.intercept,
        predicted_exponent: predicted,
    };
    match cfg.format {
        Format::Json => write_json(cfg, &report),
        Format::Csv => with_output(cfg, |w| {
            writeln!(w, "norm,k_min,points,slope,stderr,intercept,predicted_exponent")?;
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{:.16e},{}",
                report.norm,
                report.k_min,
                report.points,
                report.slope,
                report.stderr,
                report.intercept,
                predicted.map_or(String::new(), |p| format!("{p:.16e}"))
            )
        }),
    }
}

#[derive(Serialize)]
struct BoundReport {
    #[serde(flatten)]
    bound: blaschke_lab::VdcBound,
    empirical_sup: f64,
    dominated: bool,
}

pub fn bound(cfg: &RunConfig, zeros: &str, k: usize, eps_grid: Option<&str>) -> anyhow::Result<()> {
    let b = parse_zeros(zeros)?;
    let grid = match eps_grid {
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Validation(format!("bad epsilon `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => default_epsilon_grid(),
    };
    let bound = vdc_bound(&b, k, &grid, &cfg.census())?;
    let sup = coeffs_of_power(&b, k, &cfg.coeff())?.sup_coeff();
    let dominated = sup <= bound.best + 1e-9;
    let report = BoundReport {
        bound,
        empirical_sup: sup,
        dominated,
    };
    match cfg.format {
        Format::Json => write_json(cfg, &report)?,
        Format::Csv => with_output(cfg, |w| {
            writeln!(w, "# k = {k}")?;
            writeln!(w, "# s = {}", report.bound.s)?;
            writeln!(w, "# best = {:.16e}", report.bound.best)?;
            writeln!(w, "# empirical_sup = {sup:.16e}")?;
            writeln!(w, "# dominated = {dominated}")?;
            writeln!(w, "epsilon,m_epsilon,value")?;
            for e in &report.bound.per_epsilon {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", e.epsilon, e.m_epsilon, e.value)?;
            }
            Ok(())
        })?,
    }
    if !dominated {
        return Err(Error::CertificateInvalid(format!(
            "empirical sup {sup:e} exceeds the bound {:e}",
            report.bound.best
        ))
        .into());
    }
    Ok(())
}

pub fn approx(cfg: &RunConfig, request: &Path, lift: LiftStrategy, points: usize) -> anyhow::Result<()> {
    let req: ApproxRequest = read_json(request)?;
    let cert = run_pipeline(&req, &cfg.pipeline(lift, points))?;
    write_json(cfg, &cert)
}

/// Input of the `universal` subcommand.
#[derive(Deserialize)]
struct UniversalRequest {
    targets: Vec<TargetFunction>,
    epsilons: Vec<f64>,
    orlicz: OrliczFunction,
    #[serde(default = "BlaschkeProduct::default_product")]
    blaschke: BlaschkeProduct,
}

pub fn universal(cfg: &RunConfig, request: &Path, lift: LiftStrategy, points: usize) -> anyhow::Result<()> {
    let req: UniversalRequest = read_json(request)?;
    let demo = universal_partial_sums_demo(
        &req.targets,
        &req.epsilons,
        &req.orlicz,
        &req.blaschke,
        &cfg.pipeline(lift, points),
    )?;
    write_json(cfg, &demo)
}

pub fn validate(cfg: &RunConfig, certificate: &Path, points: usize) -> anyhow::Result<()> {
    let cert: ApproxCertificate = read_json(certificate)?;
    let report = validate_certificate(&cert, cfg.seed, points, cfg.rel_tol);
    write_json(cfg, &report)?;
    if !report.passed {
        return Err(Error::CertificateInvalid(report.failures.join("; ")).into());
    }
    Ok(())
}
