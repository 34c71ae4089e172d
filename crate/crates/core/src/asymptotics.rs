//! Norm sweeps of `B^k`, log-log rate fits and the van der Corput coefficient bound.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{BlaschkeProduct, CensusOptions, PhaseCensus};
use crate::coefficients::{coeffs_of_power, CoeffOptions, CoefficientSeries};
use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_norm, OrliczFunction, DEFAULT_REL_TOL};

/// Which sequence norm a sweep measures.
#[derive(Debug, Clone)]
pub enum NormKind {
    Orlicz(OrliczFunction),
    Sup,
    L1,
    L2,
}

impl NormKind {
    pub fn measure(&self, s: &CoefficientSeries, rel_tol: f64) -> Result<f64> {
        Ok(match self {
            NormKind::Orlicz(phi) => luxemburg_norm(phi, s, rel_tol)?.value,
            NormKind::Sup => s.sup_coeff(),
            NormKind::L1 => s.l1_norm(),
            NormKind::L2 => s.l2_norm(),
        })
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Orlicz(phi) => f.write_str(phi.label()),
            NormKind::Sup => f.write_str("sup"),
            NormKind::L1 => f.write_str("l1"),
            NormKind::L2 => f.write_str("l2"),
        }
    }
}

/// Parses `sup`, `l1`, `l2`, `power:<p>` or `quadlog:<a>`.
impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sup" => return Ok(NormKind::Sup),
            "l1" => return Ok(NormKind::L1),
            "l2" => return Ok(NormKind::L2),
            _ => {}
        }
        let (family, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("unknown norm `{s}`")))?;
        let x: f64 = param
            .parse()
            .map_err(|_| Error::Validation(format!("bad parameter in norm `{s}`")))?;
        match family {
            "power" => Ok(NormKind::Orlicz(OrliczFunction::power(x)?)),
            "quadlog" => Ok(NormKind::Orlicz(OrliczFunction::quad_log(x)?)),
            _ => Err(Error::Validation(format!("unknown norm family `{family}`"))),
        }
    }
}

/// `2^i` for every power of two in `[lo, hi]`.
pub fn dyadic_ks(lo: usize, hi: usize) -> Vec<usize> {
    let mut k = lo.max(1).next_power_of_two();
    let mut out = Vec::new();
    while k <= hi {
        out.push(k);
        k *= 2;
    }
    out
}

/// Parses `lo:hi:dyadic` or a comma separated list.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Validation(format!("invalid k range `{s}`"));
    let ks: Vec<usize> = if let Some(rest) = s.strip_suffix(":dyadic") {
        let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
        dyadic_ks(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        )
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() || ks.contains(&0) || ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad());
    }
    Ok(ks)
}

/// Norms of `B^k` over increasing `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSweep {
    pub ks: Vec<usize>,
    pub values: Vec<f64>,
    pub aliasing_bounds: Vec<f64>,
    pub norm_kind: String,
    pub blaschke: Option<BlaschkeProduct>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub coeff: CoeffOptions,
    pub rel_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            coeff: CoeffOptions::default(),
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

/// Evaluates each `k` independently (in parallel); results do not depend on scheduling.
pub fn norm_sweep(b: &BlaschkeProduct, kind: &NormKind, ks: &[usize], opts: &SweepOptions) -> Result<NormSweep> {
    if ks.is_empty() || ks.windows(2).any(|w| w[1] <= w[0]) || ks[0] == 0 {
        return Err(Error::Validation(
            "ks must be a nonempty strictly increasing list of positive integers".into(),
        ));
    }
    let points: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let s = coeffs_of_power(b, k, &opts.coeff)?;
            Ok((kind.measure(&s, opts.rel_tol)?, s.aliasing_bound()))
        })
        .collect::<Result<_>>()?;
    Ok(NormSweep {
        ks: ks.to_vec(),
        values: points.iter().map(|p| p.0).collect(),
        aliasing_bounds: points.iter().map(|p| p.1).collect(),
        norm_kind: kind.to_string(),
        blaschke: Some(b.clone()),
    })
}

impl NormSweep {
    /// CSV with `#` comments and rows `k,value,aliasing_bound`.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# norm = {}", self.norm_kind)?;
        if let Some(b) = &self.blaschke {
            let zeros: Vec<String> = b.zeros().iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
            writeln!(out, "# zeros = {}", zeros.join(" "))?;
        }
        writeln!(out, "k,value,aliasing_bound")?;
        for ((k, v), a) in self.ks.iter().zip(&self.values).zip(&self.aliasing_bounds) {
            writeln!(out, "{k},{v:.16e},{a:.16e}")?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`NormSweep::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<NormSweep> {
        let mut sweep = NormSweep {
            ks: Vec::new(),
            values: Vec::new(),
            aliasing_bounds: Vec::new(),
            norm_kind: String::new(),
            blaschke: None,
        };
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Validation(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(kind) = comment.trim().strip_prefix("norm = ") {
                    sweep.norm_kind = kind.to_string();
                } else if let Some(zeros) = comment.trim().strip_prefix("zeros = ") {
                    let zeros = zeros
                        .split_whitespace()
                        .map(|z| z.parse::<Complex64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::Validation(format!("sweep line {}: bad zeros `{zeros}`", lineno + 1)))?;
                    sweep.blaschke = Some(BlaschkeProduct::new(zeros)?);
                }
                continue;
            }
            if line.starts_with("k,") {
                continue;
            }
            let bad = || Error::Validation(format!("sweep line {}: `{line}`", lineno + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 {
                return Err(bad());
            }
            sweep.ks.push(fields[0].parse().map_err(|_| bad())?);
            sweep.values.push(fields[1].parse().map_err(|_| bad())?);
            sweep
                .aliasing_bounds
                .push(fields.get(2).map_or(Ok(0.0), |f| f.parse()).map_err(|_| bad())?);
        }
        Ok(sweep)
    }
}

/// Ordinary least squares fit of `log value` against `log k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 6;

/// Fits the sweep restricted to `k >= k_min`.
pub fn fit_decay_exponent(sweep: &NormSweep, k_min: usize) -> Result<DecayFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sweep
        .ks
        .iter()
        .zip(&sweep.values)
        .filter(|(k, v)| **k >= k_min && **v > 0.0)
        .map(|(&k, &v)| ((k as f64).ln(), v.ln()))
        .unzip();
    fit_line(&xs, &ys)
}

fn fit_line(xs: &[f64], ys: &[f64]) -> Result<DecayFit> {
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            available: n,
        });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("all k values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(DecayFit {
        slope,
        stderr: (sse / (n - 2) as f64 / sxx).sqrt(),
        intercept,
        points: n,
    })
}

/// `-1/N` from the phase census.
pub fn predicted_exponent(b: &BlaschkeProduct, opts: &CensusOptions) -> Result<f64> {
    Ok(b.phase_census(opts)?.decay_exponent())
}

/// One grid point of [`VdcBound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdcEntry {
    pub epsilon: f64,
    /// Minimum of `|psi''|` over the shrunk census intervals.
    pub m_epsilon: f64,
    pub value: f64,
}

/// Bound `(1/2pi)(2(s+1) eps + 8(s+1)/sqrt(k M_eps))` on every `|B^k coefficient|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdcBound {
    pub k: usize,
    pub s: usize,
    pub epsilon_grid: Vec<f64>,
    pub per_epsilon: Vec<VdcEntry>,
    /// Grid values for which some shrunk interval was empty.
    pub skipped: Vec<f64>,
    pub best: f64,
}

/// `10^-1, 10^-1.5, ..., 10^-4`.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..7).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

const VDC_SAMPLES: usize = 4096;
/// Census zeros within this distance of 0 or 2pi coincide with the endpoints.
const DEGENERATE_INTERVAL: f64 = 1e-8;

/// Assembles the bound for each `eps` from the census of `B`.
pub fn vdc_bound(b: &BlaschkeProduct, k: usize, epsilon_grid: &[f64], census_opts: &CensusOptions) -> Result<VdcBound> {
    let census = b.phase_census(census_opts)?;
    vdc_bound_from_census(b, &census, k, epsilon_grid)
}

pub fn vdc_bound_from_census(
    b: &BlaschkeProduct,
    census: &PhaseCensus,
    k: usize,
    epsilon_grid: &[f64],
) -> Result<VdcBound> {
    if k == 0 {
        return Err(Error::Validation("k must be positive".into()));
    }
    let mut breaks = vec![0.0];
    breaks.extend_from_slice(&census.zeros_of_psi2);
    breaks.push(TAU);
    let intervals: Vec<(f64, f64)> = breaks
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(a, b)| b - a > DEGENERATE_INTERVAL)
        .collect();
    let s1 = (census.s + 1) as f64;
    let psi2 = |t: f64| b.phase_derivative_of_order(2, t).abs();

    let mut per_epsilon = Vec::new();
    let mut skipped = Vec::new();
    for &eps in epsilon_grid {
        if !(eps > 0.0) || intervals.iter().any(|(a, b)| a + eps >= b - eps) {
            skipped.push(eps);
            continue;
        }
        let m_eps = intervals
            .iter()
            .map(|&(a, b)| min_on_interval(&psi2, a + eps, b - eps))
            .fold(f64::INFINITY, f64::min);
        if !(m_eps > 0.0) {
            skipped.push(eps);
            continue;
        }
        let value = (2.0 * s1 * eps + 8.0 * s1 / (k as f64 * m_eps).sqrt()) / TAU;
        per_epsilon.push(VdcEntry {
            epsilon: eps,
            m_epsilon: m_eps,
            value,
        });
    }
    let best = per_epsilon.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    if per_epsilon.is_empty() {
        return Err(Error::BoundUnavailable);
    }
    Ok(VdcBound {
        k,
        s: census.s,
        epsilon_grid: epsilon_grid.to_vec(),
        per_epsilon,
        skipped,
        best,
    })
}

/// Dense sampling followed by golden-section refinement around the smallest sample.
fn min_on_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / (VDC_SAMPLES - 1) as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..VDC_SAMPLES {
        let v = f(a + i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = a + best_i.saturating_sub(1) as f64 * h;
    let mut hi = (a + (best_i + 1) as f64 * h).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    best.min(f1).min(f2).min(f(a)).min(f(b))
}

/// The van der Corput constant `8 / sqrt(m)` for `|F''| >= m`.
pub fn van_der_corput_constant(m: f64) -> f64 {
    8.0 / m.sqrt()
}

/// `|int_a^b exp(i F(x)) dx|` by composite Simpson with `n` (even) panels.
pub fn oscillatory_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = num_complex::Complex64::cis(f(a)) + num_complex::Complex64::cis(f(b));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * num_complex::Complex64::cis(f(a + i as f64 * h));
    }
    (sum * h / 3.0).norm()
}
