//! Finite Blaschke products and their boundary phase.
//!
//! For a zero `lambda != 0` the factor is `(lambda/|lambda|)(lambda - z)/(1 - conj(lambda) z)`;
//! a zero at the origin contributes the plain factor `z`. On the circle
//! `B(e^{it}) = exp(i psi(t))` with `psi` strictly increasing by `2pi deg B`.
//!
//! Phase derivatives come from the Poisson kernel: with `w = lambda e^{-it}`,
//! `psi_lambda'(t) = Re[(1 + w)/(1 - w)]` and, for `m >= 1`,
//! `psi_lambda^{(m+1)}(t) = Re[2 (-i)^m Li_{-m}(w)]`, where the negative-order
//! polylogarithm is the rational function
//! `Li_{-m}(w) = sum_{k=0}^{m} k! S(m+1, k+1) (w/(1-w))^{k+1}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arcs::ArcSet;
use crate::error::{Error, Result};

/// Highest phase derivative order supported by the closed forms.
pub const MAX_DERIVATIVE_ORDER: usize = 10;

const POLE_GUARD: f64 = 1e-14;

/// `k! * S(m+1, k+1)` for `m < MAX_DERIVATIVE_ORDER`, `k <= m`.
fn polylog_weights() -> &'static [[f64; MAX_DERIVATIVE_ORDER]; MAX_DERIVATIVE_ORDER] {
    use std::sync::OnceLock;
    static WEIGHTS: OnceLock<[[f64; MAX_DERIVATIVE_ORDER]; MAX_DERIVATIVE_ORDER]> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        // Stirling numbers of the second kind, S[n][k].
        let n_max = MAX_DERIVATIVE_ORDER + 1;
        let mut stirling = vec![vec![0.0f64; n_max + 1]; n_max + 1];
        stirling[0][0] = 1.0;
        for n in 1..=n_max {
            for k in 1..=n {
                stirling[n][k] = k as f64 * stirling[n - 1][k] + stirling[n - 1][k - 1];
            }
        }
        let mut w = [[0.0; MAX_DERIVATIVE_ORDER]; MAX_DERIVATIVE_ORDER];
        for (m, row) in w.iter_mut().enumerate() {
            let mut fact = 1.0;
            for (k, slot) in row.iter_mut().enumerate().take(m + 1) {
                if k > 0 {
                    fact *= k as f64;
                }
                *slot = fact * stirling[m + 1][k + 1];
            }
        }
        w
    })
}

/// A finite Blaschke product given by its zeros (repetition encodes multiplicity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeSpec", into = "BlaschkeSpec")]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    /// Distinct zeros with multiplicities.
    groups: Vec<(Complex64, usize)>,
}

/// JSON form `{"zeros": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    pub zeros: Vec<Complex64>,
}

impl TryFrom<BlaschkeSpec> for BlaschkeProduct {
    type Error = Error;
    fn try_from(spec: BlaschkeSpec) -> Result<Self> {
        BlaschkeProduct::new(spec.zeros)
    }
}

impl From<BlaschkeProduct> for BlaschkeSpec {
    fn from(b: BlaschkeProduct) -> Self {
        BlaschkeSpec { zeros: b.zeros }
    }
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Validation("a Blaschke product needs at least one zero".into()));
        }
        for z in &zeros {
            if !z.re.is_finite() || !z.im.is_finite() || z.norm() >= 1.0 {
                return Err(Error::Validation(format!("zero {z} is not inside the open unit disk")));
            }
        }
        let mut groups: Vec<(Complex64, usize)> = Vec::new();
        for z in &zeros {
            match groups.iter_mut().find(|(g, _)| g == z) {
                Some((_, m)) => *m += 1,
                None => groups.push((*z, 1)),
            }
        }
        Ok(BlaschkeProduct { zeros, groups })
    }

    pub fn from_real_zeros(zeros: &[f64]) -> Result<Self> {
        Self::new(zeros.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `z * b_{1/2}`, the smallest generic product vanishing at the origin.
    pub fn default_product() -> Self {
        Self::from_real_zeros(&[0.0, 0.5]).expect("valid zeros")
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Order of the zero at the origin.
    pub fn origin_order(&self) -> usize {
        self.zeros.iter().filter(|z| **z == Complex64::new(0.0, 0.0)).count()
    }

    /// `B^n`, as a product with every zero repeated `n` times.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("power must be positive".into()));
        }
        let mut zeros = Vec::with_capacity(self.zeros.len() * n);
        for _ in 0..n {
            zeros.extend_from_slice(&self.zeros);
        }
        Ok(BlaschkeProduct {
            zeros,
            groups: self.groups.iter().map(|&(z, m)| (z, m * n)).collect(),
        })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &(lambda, mult) in &self.groups {
            let f = if lambda.norm_sqr() == 0.0 {
                z
            } else {
                let denom = Complex64::new(1.0, 0.0) - lambda.conj() * z;
                let distance = denom.norm();
                if distance < POLE_GUARD {
                    return Err(Error::Domain {
                        z,
                        zero: lambda,
                        distance,
                    });
                }
                (lambda / lambda.norm()) * (lambda - z) / denom
            };
            acc *= f.powu(mult as u32);
        }
        Ok(acc)
    }

    /// `B(e^{i theta})`; never near a pole since all zeros are inside the disk.
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        let zeta = Complex64::cis(theta);
        let mut acc = Complex64::new(1.0, 0.0);
        for &(lambda, mult) in &self.groups {
            let f = if lambda.norm_sqr() == 0.0 {
                zeta
            } else {
                (lambda / lambda.norm()) * (lambda - zeta) / (Complex64::new(1.0, 0.0) - lambda.conj() * zeta)
            };
            acc *= f.powu(mult as u32);
        }
        acc
    }

    /// `psi_B'(theta) = sum_j (1 - |lambda_j|^2) / |e^{i theta} - lambda_j|^2`.
    pub fn phase_derivative(&self, theta: f64) -> f64 {
        let zeta = Complex64::cis(theta);
        self.groups
            .iter()
            .map(|&(lambda, mult)| {
                if lambda.norm_sqr() == 0.0 {
                    mult as f64
                } else {
                    mult as f64 * (1.0 - lambda.norm_sqr()) / (zeta - lambda).norm_sqr()
                }
            })
            .sum()
    }

    /// `psi_B^{(order)}(theta)` for `1 <= order <= MAX_DERIVATIVE_ORDER`.
    pub fn phase_derivative_of_order(&self, order: usize, theta: f64) -> f64 {
        assert!(
            (1..=MAX_DERIVATIVE_ORDER).contains(&order),
            "unsupported derivative order {order}"
        );
        if order == 1 {
            return self.phase_derivative(theta);
        }
        self.groups
            .iter()
            .map(|&(lambda, mult)| mult as f64 * factor_phase_derivative(lambda, order, theta))
            .sum()
    }

    /// Continuous phase `psi_B`, normalized so `psi_B(0)` is the principal argument of `B(1)`.
    pub fn phase(&self, theta: f64) -> f64 {
        let base = self.boundary_value(0.0).arg();
        base + self
            .groups
            .iter()
            .map(|&(lambda, mult)| mult as f64 * (factor_phase(lambda, theta) - factor_phase(lambda, 0.0)))
            .sum::<f64>()
    }

    /// Zeros of `psi_B''` on `[0, 2pi)` with their orders.
    pub fn phase_census(&self, opts: &CensusOptions) -> Result<PhaseCensus> {
        if self.is_monomial() {
            return Err(Error::Monomial);
        }
        let samples = opts.samples_per_degree.max(1) * self.degree();
        census_from_derivatives(&|order, t| self.phase_derivative_of_order(order, t), samples, opts)
    }

    /// `{theta : psi_B(theta) mod 2pi in arcs}`.
    ///
    /// When `B(0) = 0` the boundary map preserves normalized Lebesgue measure,
    /// so the result has the same measure as `arcs`.
    pub fn preimage_of_arc(&self, arcs: &ArcSet) -> Result<ArcSet> {
        if arcs.is_empty() {
            return Ok(ArcSet::empty());
        }
        let inverse = PhaseInverse::new(self);
        let lo_value = inverse.start;
        let hi_value = inverse.end;
        let mut pieces = Vec::new();
        for &(a, b) in arcs.arcs() {
            let m_lo = ((lo_value - b) / TAU).floor() as i64;
            let m_hi = ((hi_value - a) / TAU).ceil() as i64;
            for m in m_lo..=m_hi {
                let shift = TAU * m as f64;
                let lo = (a + shift).max(lo_value);
                let hi = (b + shift).min(hi_value);
                if lo < hi {
                    pieces.push((inverse.solve(lo)?, inverse.solve(hi)?));
                }
            }
        }
        ArcSet::new(&pieces)
    }
}

/// `theta + 2 atan2(r sin(theta - alpha), 1 - r cos(theta - alpha))`, a continuous
/// branch of the argument of one factor (up to a constant).
fn factor_phase(lambda: Complex64, theta: f64) -> f64 {
    if lambda.norm_sqr() == 0.0 {
        return theta;
    }
    let (r, alpha) = lambda.to_polar();
    let u = theta - alpha;
    theta + 2.0 * (r * u.sin()).atan2(1.0 - r * u.cos())
}

fn factor_phase_derivative(lambda: Complex64, order: usize, theta: f64) -> f64 {
    if lambda.norm_sqr() == 0.0 {
        return 0.0;
    }
    let w = lambda * Complex64::cis(-theta);
    let m = order - 1;
    let u = w / (Complex64::new(1.0, 0.0) - w);
    let weights = &polylog_weights()[m];
    let mut li = Complex64::new(0.0, 0.0);
    let mut u_pow = u;
    for &c in weights.iter().take(m + 1) {
        li += c * u_pow;
        u_pow *= u;
    }
    // (-i)^m
    let rot = match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    2.0 * (rot * li).re
}

/// Inverts the increasing map `theta -> psi_B(theta)` on `[0, 2pi]`.
struct PhaseInverse<'a> {
    b: &'a BlaschkeProduct,
    nodes: Vec<f64>,
    values: Vec<f64>,
    start: f64,
    end: f64,
}

impl<'a> PhaseInverse<'a> {
    fn new(b: &'a BlaschkeProduct) -> Self {
        let count = 16 * b.degree() + 16;
        let nodes: Vec<f64> = (0..=count).map(|i| TAU * i as f64 / count as f64).collect();
        let mut values: Vec<f64> = nodes.iter().map(|&t| b.phase(t)).collect();
        let start = values[0];
        let end = start + TAU * b.degree() as f64;
        values[count] = end;
        PhaseInverse {
            b,
            nodes,
            values,
            start,
            end,
        }
    }

    fn solve(&self, y: f64) -> Result<f64> {
        if y <= self.start {
            return Ok(0.0);
        }
        if y >= self.end {
            return Ok(TAU);
        }
        let idx = self.values.partition_point(|&v| v <= y).clamp(1, self.nodes.len() - 1);
        let (mut lo, mut hi) = (self.nodes[idx - 1], self.nodes[idx]);
        let mut theta = lo + (hi - lo) * (y - self.values[idx - 1]) / (self.values[idx] - self.values[idx - 1]);
        for _ in 0..200 {
            let f = self.b.phase(theta) - y;
            if f == 0.0 {
                return Ok(theta);
            }
            if f > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let newton = theta - f / self.b.phase_derivative(theta);
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - theta).abs() <= 4.0 * f64::EPSILON * theta.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            theta = next;
        }
        Err(Error::Internal(format!(
            "phase inversion did not converge for value {y}"
        )))
    }
}

/// Tuning of the `psi_B''` zero census.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusOptions {
    /// Angular accuracy of each located zero.
    pub tol_xi: f64,
    /// Sampling density of the sign scan.
    pub samples_per_degree: usize,
    /// Relative threshold below which a higher derivative counts as zero.
    pub tol_mult: f64,
    /// Cap on reported orders `N_l`.
    pub max_order: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            tol_xi: 1e-10,
            samples_per_degree: 4096,
            tol_mult: 1e-6,
            max_order: 8,
        }
    }
}

/// Zeros `xi_l` of `psi_B''` in `[0, 2pi)` and orders `N_l`: the first derivative of
/// `psi_B` that does not vanish at `xi_l` has order `N_l >= 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCensus {
    pub zeros_of_psi2: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub s: usize,
    #[serde(rename = "N")]
    pub n_max: usize,
}

impl PhaseCensus {
    /// Exponent `-1/N` of the sup-coefficient decay `k^{-1/N}`.
    pub fn decay_exponent(&self) -> f64 {
        -1.0 / self.n_max as f64
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Census of a periodic `psi` given its derivative oracle `deriv(order, theta)`.
///
/// Odd-order zeros of `psi''` show up as sign changes of `psi''`; even-order ones as
/// sign changes of `psi'''` at which `psi''` is negligible.
pub(crate) fn census_from_derivatives(
    deriv: &dyn Fn(usize, f64) -> f64,
    samples: usize,
    opts: &CensusOptions,
) -> Result<PhaseCensus> {
    if !(opts.tol_xi > 0.0 && opts.tol_mult > 0.0) || opts.max_order < 3 || opts.max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Configuration(format!("invalid census options {opts:?}")));
    }
    let n = samples.max(16);
    let h = TAU / n as f64;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();

    let mut scales = vec![0.0f64; opts.max_order + 1];
    let mut d2 = Vec::with_capacity(n);
    let mut d3 = Vec::with_capacity(n);
    for &t in &grid {
        for (order, scale) in scales.iter_mut().enumerate().skip(2) {
            let v = deriv(order, t);
            *scale = scale.max(v.abs());
            if order == 2 {
                d2.push(v);
            } else if order == 3 {
                d3.push(v);
            }
        }
    }
    if scales[2] == 0.0 {
        return Err(Error::Monomial);
    }
    let negligible = |order: usize, v: f64| v.abs() < opts.tol_mult * scales[order];

    let psi2 = |t: f64| deriv(2, t);
    let psi3 = |t: f64| deriv(3, t);
    let bisect_tol = opts.tol_xi * 0.25;

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let lo = grid[i];
        let hi = if j == 0 { grid[0] + TAU } else { grid[j] };
        if (d2[i] > 0.0) != (d2[j] > 0.0) && d2[i] != 0.0 && d2[j] != 0.0 {
            roots.push(bisect(&psi2, lo, hi, bisect_tol).rem_euclid(TAU));
        }
    }
    let merge_radius = 1e-6;
    let mut even_roots = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let lo = grid[i];
        let hi = if j == 0 { grid[0] + TAU } else { grid[j] };
        if (d3[i] > 0.0) != (d3[j] > 0.0) {
            let t = bisect(&psi3, lo, hi, bisect_tol).rem_euclid(TAU);
            if negligible(2, psi2(t)) && roots.iter().all(|&r| circular_distance(r, t) > merge_radius) {
                even_roots.push(t);
            }
        }
    }
    roots.extend(even_roots);
    for r in roots.iter_mut() {
        if TAU - *r < opts.tol_xi {
            *r = 0.0;
        }
    }
    roots.sort_by(f64::total_cmp);

    let min_separation = 10.0 * opts.tol_xi;
    for idx in 0..roots.len() {
        let next = (idx + 1) % roots.len();
        if next != idx && circular_distance(roots[idx], roots[next]) < min_separation {
            return Err(Error::Resolution {
                first: roots[idx],
                second: roots[next],
                min_separation,
            });
        }
    }

    let multiplicities: Vec<usize> = roots
        .iter()
        .map(|&xi| {
            (3..=opts.max_order)
                .find(|&order| !negligible(order, deriv(order, xi)))
                .unwrap_or(opts.max_order)
        })
        .collect();
    let n_max = multiplicities.iter().copied().max().unwrap_or(0);
    Ok(PhaseCensus {
        s: roots.len(),
        zeros_of_psi2: roots,
        multiplicities,
        n_max,
    })
}

/// Angle reduced to `[0, 2pi)`; values within `tol` of `2pi` map to 0.
pub fn normalize_angle(theta: f64, tol: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if TAU - t < tol {
        0.0
    } else {
        t
    }
}
