//! Taylor coefficient vectors, FFT coefficients of `B^k`, and the elementary
//! transforms (product, dilation, truncation) used by the approximation engine.

use std::cell::RefCell;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};

/// Relative threshold below which a coefficient does not count for the valuation.
pub const VALUATION_THRESHOLD: f64 = 1e-13;

const DIRECT_CONVOLUTION_MAX: usize = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Finite coefficient vector `c_0, c_1, ...` of an analytic function.
///
/// `aliasing_bound` bounds the squared l2 mass of the error committed in
/// computing the coefficients (aliasing and discarded tail), in the same units
/// as the Parseval defect `|sum |c_j|^2 - 1|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct CoefficientSeries {
    coeffs: Vec<Complex64>,
    aliasing_bound: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    coeffs: Vec<Complex64>,
    aliasing_bound: f64,
    #[serde(default)]
    valuation: Option<usize>,
}

impl TryFrom<SeriesJson> for CoefficientSeries {
    type Error = Error;
    fn try_from(raw: SeriesJson) -> Result<Self> {
        let s = CoefficientSeries::with_bound(raw.coeffs, raw.aliasing_bound)?;
        if raw.valuation.is_some() && raw.valuation != s.valuation() {
            return Err(Error::Validation(format!(
                "stated valuation {:?} disagrees with the coefficients ({:?})",
                raw.valuation,
                s.valuation()
            )));
        }
        Ok(s)
    }
}

impl From<CoefficientSeries> for SeriesJson {
    fn from(s: CoefficientSeries) -> Self {
        SeriesJson {
            valuation: s.valuation(),
            coeffs: s.coeffs,
            aliasing_bound: s.aliasing_bound,
        }
    }
}

impl CoefficientSeries {
    /// An exact series (aliasing bound 0).
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        CoefficientSeries {
            coeffs,
            aliasing_bound: 0.0,
        }
    }

    pub fn with_bound(coeffs: Vec<Complex64>, aliasing_bound: f64) -> Result<Self> {
        if !(aliasing_bound >= 0.0 && aliasing_bound.is_finite()) {
            return Err(Error::Validation(format!(
                "aliasing bound {aliasing_bound} must be finite and >= 0"
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("coefficients must be finite".into()));
        }
        Ok(CoefficientSeries { coeffs, aliasing_bound })
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    /// `c * z^j`.
    pub fn monomial(j: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); j + 1];
        coeffs[j] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn aliasing_bound(&self) -> f64 {
        self.aliasing_bound
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Smallest index whose coefficient exceeds `1e-13 * max |c_j|`; `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        let max = self.sup_coeff();
        if max == 0.0 {
            return None;
        }
        self.coeffs.iter().position(|c| c.norm() > VALUATION_THRESHOLD * max)
    }

    /// First index holding an exactly nonzero coefficient.
    pub fn structural_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm_sqr() != 0.0)
    }

    /// Highest index holding an exactly nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm_sqr() != 0.0)
    }

    pub fn sup_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(sum |c_j|^p)^{1/p}` for `p` in {1, 2}.
    pub fn seq_norm(&self, p: u32) -> Result<f64> {
        match p {
            1 => Ok(self.l1_norm()),
            2 => Ok(self.l2_norm()),
            _ => Err(Error::Validation(format!("seq_norm supports p = 1 or 2, got {p}"))),
        }
    }

    /// Cauchy product. Entries below the sum of the exact valuations are exactly zero.
    pub fn multiply(&self, other: &CoefficientSeries) -> CoefficientSeries {
        // The bounds are squared l2 masses; ||e * b||_2 <= ||e||_2 ||b||_1.
        let (ea, eb) = (self.aliasing_bound.sqrt(), other.aliasing_bound.sqrt());
        let bound = (ea * other.l1_norm() + eb * self.l1_norm() + ea * eb).powi(2);
        let (va, vb) = match (self.structural_valuation(), other.structural_valuation()) {
            (Some(va), Some(vb)) => (va, vb),
            _ => {
                return CoefficientSeries {
                    coeffs: Vec::new(),
                    aliasing_bound: bound,
                }
            }
        };
        let a = &self.coeffs[..=self.degree().unwrap_or(0)];
        let b = &other.coeffs[..=other.degree().unwrap_or(0)];
        let out_len = a.len() + b.len() - 1;
        let mut out = if a.len().min(b.len()) <= DIRECT_CONVOLUTION_MAX {
            let mut out = vec![Complex64::new(0.0, 0.0); out_len];
            for (i, &x) in a.iter().enumerate().skip(va) {
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate().skip(vb) {
                    out[i + j] += x * y;
                }
            }
            out
        } else {
            let m = out_len.next_power_of_two();
            let mut fa = a.to_vec();
            fa.resize(m, Complex64::new(0.0, 0.0));
            let mut fb = b.to_vec();
            fb.resize(m, Complex64::new(0.0, 0.0));
            fft_in_place(&mut fa, false);
            fft_in_place(&mut fb, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x *= y;
            }
            fft_in_place(&mut fa, true);
            let scale = 1.0 / m as f64;
            fa.truncate(out_len);
            for x in fa.iter_mut() {
                *x *= scale;
            }
            fa
        };
        for x in out.iter_mut().take(va + vb) {
            *x = Complex64::new(0.0, 0.0);
        }
        CoefficientSeries {
            coeffs: out,
            aliasing_bound: bound,
        }
    }

    /// Coefficients of `z -> s(r z)`.
    pub fn dilate(&self, r: f64) -> Result<CoefficientSeries> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Validation(format!("dilation radius {r} must lie in (0, 1)")));
        }
        let mut pow = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * pow;
                pow *= r;
                out
            })
            .collect();
        Ok(CoefficientSeries {
            coeffs,
            aliasing_bound: self.aliasing_bound,
        })
    }

    /// Partial sum `S_n`: coefficients of index `> n` are dropped.
    pub fn truncate(&self, n: usize) -> CoefficientSeries {
        CoefficientSeries {
            coeffs: self.coeffs.iter().take(n + 1).copied().collect(),
            aliasing_bound: self.aliasing_bound,
        }
    }

    /// Drops trailing exact zeros.
    pub fn trimmed(mut self) -> CoefficientSeries {
        let keep = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(keep);
        self
    }

    /// Multiplies by `z^offset`.
    pub fn shift(&self, offset: usize) -> CoefficientSeries {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); offset];
        coeffs.extend_from_slice(&self.coeffs);
        CoefficientSeries {
            coeffs,
            aliasing_bound: self.aliasing_bound,
        }
    }

    pub fn scale(&self, alpha: Complex64) -> CoefficientSeries {
        CoefficientSeries {
            coeffs: self.coeffs.iter().map(|&c| c * alpha).collect(),
            aliasing_bound: self.aliasing_bound * alpha.norm_sqr(),
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: Complex64, other: &CoefficientSeries) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Complex64::new(0.0, 0.0));
        }
        for (x, &y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += alpha * y;
        }
        self.aliasing_bound = (self.aliasing_bound.sqrt() + alpha.norm() * other.aliasing_bound.sqrt()).powi(2);
    }

    pub fn sub(&self, other: &CoefficientSeries) -> CoefficientSeries {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// Horner evaluation at `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Values at `e^{2 pi i n / m}`, `n = 0..m`, by folding the coefficients modulo `m`.
    pub fn boundary_samples(&self, m: usize) -> Vec<Complex64> {
        assert!(m > 0);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (j, &c) in self.coeffs.iter().enumerate() {
            buf[j % m] += c;
        }
        fft_in_place(&mut buf, true);
        buf
    }

    /// CSV with `#` comment lines, a `j,re,im` header and one row per coefficient.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W, comments: &[String]) -> io::Result<()> {
        writeln!(out, "# aliasing_bound = {:e}", self.aliasing_bound)?;
        match self.valuation() {
            Some(v) => writeln!(out, "# valuation = {v}")?,
            None => writeln!(out, "# valuation = none")?,
        }
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "j,re,im")?;
        for (j, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{j},{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Controls for [`coeffs_of_power`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffOptions {
    /// Acceptable aliasing defect.
    pub tol: f64,
    /// Largest admissible FFT grid.
    pub m_cap: usize,
}

impl Default for CoeffOptions {
    fn default() -> Self {
        CoeffOptions {
            tol: 1e-10,
            m_cap: 1 << 26,
        }
    }
}

/// Initial FFT grid for `B^k`.
pub fn initial_grid(b: &BlaschkeProduct, k: usize) -> usize {
    (4 * k * b.degree()).max(1024).next_power_of_two()
}

/// Taylor coefficients of `B^k` on a grid of `M` roots of unity, `M` doubled until
/// the defect `max(sum_{j >= M/2} |c_j|^2, |sum_j |c_j|^2 - 1|)` is at most `tol`.
///
/// The upper half of the discrete spectrum carries the aliased tail, since the
/// true coefficients are concentrated below `k * deg B * max psi'`. The returned
/// `aliasing_bound` is the achieved defect.
pub fn coeffs_of_power(b: &BlaschkeProduct, k: usize, opts: &CoeffOptions) -> Result<CoefficientSeries> {
    if k == 0 {
        return Err(Error::Validation("power k must be positive".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Validation(format!("tolerance {} must be positive", opts.tol)));
    }
    if b.is_monomial() {
        return Ok(CoefficientSeries::monomial(k * b.degree(), Complex64::new(1.0, 0.0)));
    }
    let exact_zeros = k * b.origin_order();
    let mut m = initial_grid(b, k);
    loop {
        if m > opts.m_cap {
            let defect = coeffs_on_grid(b, k, opts.m_cap.max(1).next_power_of_two() / 2).1;
            return Err(Error::Resource {
                requested: m,
                cap: opts.m_cap,
                defect,
            });
        }
        let (mut coeffs, defect) = coeffs_on_grid(b, k, m);
        if defect <= opts.tol {
            for c in coeffs.iter_mut().take(exact_zeros) {
                *c = Complex64::new(0.0, 0.0);
            }
            return Ok(CoefficientSeries {
                coeffs,
                aliasing_bound: defect,
            });
        }
        m *= 2;
    }
}

fn coeffs_on_grid(b: &BlaschkeProduct, k: usize, m: usize) -> (Vec<Complex64>, f64) {
    let step = std::f64::consts::TAU / m as f64;
    let mut buf: Vec<Complex64> = (0..m)
        .into_par_iter()
        .with_min_len(4096)
        .map(|n| {
            let v = b.boundary_value(n as f64 * step);
            let v = v / v.norm();
            let p = v.powu(k as u32);
            p / p.norm()
        })
        .collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / m as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
    let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = buf[m / 2..].iter().map(|c| c.norm_sqr()).sum();
    (buf, tail.max((total - 1.0).abs()))
}
