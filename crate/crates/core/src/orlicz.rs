//! Orlicz functions and Luxemburg norms of coefficient sequences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSeries;
use crate::error::{Error, Result};

/// Comparison of `phi(t)` with `t^2` as `t -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `phi(t) = o(t^2)`.
    Vanishing,
    /// `phi(t) ≍ t^2`.
    Bounded,
    /// `t^2 = o(phi(t))`.
    Divergent,
    Unclassified,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::Vanishing => "vanishing",
            Regime::Bounded => "bounded",
            Regime::Divergent => "divergent",
            Regime::Unclassified => "unclassified",
        };
        f.write_str(name)
    }
}

/// Serialized description of an Orlicz function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum OrliczSpec {
    Power {
        p: f64,
    },
    Quadlog {
        a: f64,
    },
    /// Piecewise linear through the knots, extended linearly past the last one.
    Table {
        knots: Vec<(f64, f64)>,
    },
}

type CustomFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Family {
    Power(f64),
    QuadLog(f64),
    Table(Vec<(f64, f64)>),
    Custom(CustomFn),
}

/// A validated Orlicz function: increasing, convex, `phi(0) = 0`.
///
/// User-supplied functions must be pure; they are evaluated from several threads.
#[derive(Clone)]
pub struct OrliczFunction {
    family: Family,
    label: String,
    regime: Regime,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczFunction")
            .field("label", &self.label)
            .field("regime", &self.regime)
            .finish()
    }
}

impl OrliczFunction {
    /// `t^p`, `p >= 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Validation(format!("power exponent {p} must be >= 1")));
        }
        Self::build(Family::Power(p), format!("power:{p}"))
    }

    /// `t^2 (1 + log(1 + 1/t))^{-a}`, `a > 0`.
    pub fn quad_log(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Validation(format!("quadlog parameter {a} must be > 0")));
        }
        Self::build(Family::QuadLog(a), format!("quadlog:{a}"))
    }

    /// Piecewise linear interpolation of `(t, phi(t))` knots; `(0, 0)` is added if absent.
    pub fn table(knots: &[(f64, f64)]) -> Result<Self> {
        let mut k: Vec<(f64, f64)> = knots.to_vec();
        if k.first().is_none_or(|&(t, _)| t != 0.0) {
            k.insert(0, (0.0, 0.0));
        }
        if k.len() < 2 {
            return Err(Error::Validation("a table needs at least one knot with t > 0".into()));
        }
        for w in k.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() || !w[1].1.is_finite() {
                return Err(Error::Validation(
                    "table knots must have strictly increasing finite t".into(),
                ));
            }
        }
        let slopes: Vec<f64> = k.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        if slopes.windows(2).any(|s| s[1] < s[0] * (1.0 - 1e-12)) || slopes[0] < 0.0 {
            return Err(Error::Validation("table knots are not convex and increasing".into()));
        }
        Self::build(Family::Table(k), "table".into())
    }

    /// Arbitrary user function, checked by sampling.
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::build(Family::Custom(Arc::new(f)), label.into())
    }

    pub fn from_spec(spec: &OrliczSpec) -> Result<Self> {
        match spec {
            OrliczSpec::Power { p } => Self::power(*p),
            OrliczSpec::Quadlog { a } => Self::quad_log(*a),
            OrliczSpec::Table { knots } => Self::table(knots),
        }
    }

    /// `None` for custom functions.
    pub fn spec(&self) -> Option<OrliczSpec> {
        match &self.family {
            Family::Power(p) => Some(OrliczSpec::Power { p: *p }),
            Family::QuadLog(a) => Some(OrliczSpec::Quadlog { a: *a }),
            Family::Table(k) => Some(OrliczSpec::Table { knots: k.clone() }),
            Family::Custom(_) => None,
        }
    }

    fn build(family: Family, label: String) -> Result<Self> {
        let mut phi = OrliczFunction {
            family,
            label,
            regime: Regime::Unclassified,
        };
        phi.validate()?;
        phi.regime = phi.classify_regime()?;
        Ok(phi)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Exponent when `phi(t) = t^p`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            Family::Power(p) => Some(p),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power(p) => {
                if *p == 2.0 {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            Family::QuadLog(a) => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t * (1.0 + (1.0 / t).ln_1p()).powf(-a)
                }
            }
            Family::Table(knots) => {
                let idx = knots.partition_point(|&(x, _)| x <= t).clamp(1, knots.len() - 1);
                let (t0, y0) = knots[idx - 1];
                let (t1, y1) = knots[idx];
                y0 + (y1 - y0) * (t - t0) / (t1 - t0)
            }
            Family::Custom(f) => f(t),
        }
    }

    /// Sampled check of `phi(0) = 0`, finiteness, monotonicity and midpoint convexity.
    fn validate(&self) -> Result<()> {
        let zero = self.eval(0.0);
        if zero != 0.0 {
            return Err(Error::Validation(format!(
                "{}: phi(0) = {zero}, expected 0",
                self.label
            )));
        }
        // t = 2^{i/4}, from 2^-40 to 2^16.
        let grid: Vec<f64> = (-160..=64).map(|i| 2f64.powf(i as f64 / 4.0)).collect();
        let values: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        for (&t, &v) in grid.iter().zip(&values) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "{}: phi({t}) = {v} is not a nonnegative number",
                    self.label
                )));
            }
        }
        let rel = 1e-12;
        for i in 1..grid.len() {
            if values[i] < values[i - 1] * (1.0 - rel) {
                return Err(Error::Validation(format!(
                    "{}: not increasing near t = {}",
                    self.label, grid[i]
                )));
            }
        }
        let convex_ok = |t1: f64, v1: f64, t2: f64, v2: f64| {
            let mid = self.eval(0.5 * (t1 + t2));
            let chord = 0.5 * (v1 + v2);
            mid <= chord * (1.0 + rel) + f64::MIN_POSITIVE
        };
        for i in 0..grid.len() {
            let pairs = [
                (0.0, 0.0),
                (grid[i.saturating_sub(1)], values[i.saturating_sub(1)]),
                (grid[i.saturating_sub(4)], values[i.saturating_sub(4)]),
            ];
            for (t1, v1) in pairs {
                if !convex_ok(t1, v1, grid[i], values[i]) {
                    return Err(Error::Validation(format!(
                        "{}: midpoint convexity fails on [{t1}, {}]",
                        self.label, grid[i]
                    )));
                }
            }
        }
        if values.last().copied().unwrap_or(0.0) < 1.0 && self.unit_level().is_err() {
            return Err(Error::Validation(format!("{}: phi never reaches 1", self.label)));
        }
        Ok(())
    }

    /// Regime from the window `rho_j = phi(2^-j) / 4^-j`, `j = 10..=40`.
    pub fn classify_regime(&self) -> Result<Regime> {
        let rho: Vec<f64> = (10..=40)
            .map(|j| {
                let t = 2f64.powi(-j);
                self.eval(t) / (t * t)
            })
            .collect();
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Validation(format!("{}: invalid values near 0", self.label)));
        }
        let first = rho[0];
        let max = rho.iter().copied().fold(0.0, f64::max);
        let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(if max == 0.0 || min < 1e-3 * first {
            Regime::Vanishing
        } else if max > 1e3 * first {
            Regime::Divergent
        } else if min > 0.0 && max / min <= 10.0 {
            Regime::Bounded
        } else {
            Regime::Unclassified
        })
    }

    /// The `t*` with `phi(t*) = 1`.
    pub fn unit_level(&self) -> Result<f64> {
        if self.power_exponent().is_some() {
            return Ok(1.0);
        }
        let mut hi = 1.0;
        while self.eval(hi) < 1.0 {
            hi *= 2.0;
            if hi > 2f64.powi(64) {
                return Err(Error::Configuration(format!(
                    "{}: phi stays below 1 up to 2^64",
                    self.label
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

impl PartialEq for OrliczFunction {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.spec() == other.spec() && self.spec().is_some()
    }
}

impl Serialize for OrliczFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.spec() {
            Some(spec) => spec.serialize(serializer),
            None => {
                use serde::ser::SerializeMap;
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("family", "custom")?;
                map.serialize_entry("label", &self.label)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for OrliczFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = OrliczSpec::deserialize(deserializer)?;
        OrliczFunction::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Result of a Luxemburg norm computation; `value` is the upper end of `bracket`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgResult {
    pub value: f64,
    pub bracket: (f64, f64),
    /// The modular `sum_j phi(|c_j| / value)`.
    pub sum_at_value: f64,
}

pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// `inf { lambda > 0 : sum_j phi(|c_j| / lambda) <= 1 }`.
pub fn luxemburg_norm(phi: &OrliczFunction, s: &CoefficientSeries, rel_tol: f64) -> Result<LuxemburgResult> {
    let magnitudes: Vec<f64> = s.coeffs().iter().map(|c| c.norm()).collect();
    luxemburg_norm_of(phi, &magnitudes, rel_tol)
}

/// Luxemburg norm of a sequence of magnitudes.
pub fn luxemburg_norm_of(phi: &OrliczFunction, magnitudes: &[f64], rel_tol: f64) -> Result<LuxemburgResult> {
    if !(rel_tol > 0.0) {
        return Err(Error::Validation(format!("rel_tol {rel_tol} must be positive")));
    }
    let a: Vec<f64> = magnitudes.iter().copied().filter(|&x| x > 0.0).collect();
    if a.is_empty() {
        return Ok(LuxemburgResult {
            value: 0.0,
            bracket: (0.0, 0.0),
            sum_at_value: 0.0,
        });
    }
    let sup = a.iter().copied().fold(0.0, f64::max);
    let l1: f64 = a.iter().sum();

    let power_sum = phi
        .power_exponent()
        .map(|p| (p, a.iter().map(|x| (x / sup).powf(p)).sum::<f64>()));
    let modular = |lambda: f64| -> f64 {
        match power_sum {
            // Scaled by sup to stay in range for large p.
            Some((p, sum)) => sum * (sup / lambda).powf(p),
            None => a.iter().map(|&x| phi.eval(x / lambda)).sum(),
        }
    };

    let mut hi = l1;
    let ceiling = l1 * 2f64.powi(64);
    while modular(hi) > 1.0 {
        hi *= 2.0;
        if hi > ceiling {
            return Err(Error::Configuration(format!(
                "{}: modular still above 1 at 2^64 * ||s||_1",
                phi.label()
            )));
        }
    }
    let mut lo = (sup / phi.unit_level()?).min(hi);
    let mut guard = 0;
    while modular(lo) < 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2100 {
            return Err(Error::Internal("Luxemburg lower bracket not found".into()));
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LuxemburgResult {
        value: hi,
        bracket: (lo, hi),
        sum_at_value: modular(hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn series(xs: &[f64]) -> CoefficientSeries {
        CoefficientSeries::from_real(xs)
    }

    #[test]
    fn regimes_of_powers() {
        assert_eq!(OrliczFunction::power(3.0).unwrap().regime(), Regime::Vanishing);
        assert_eq!(OrliczFunction::power(2.0).unwrap().regime(), Regime::Bounded);
        assert_eq!(OrliczFunction::power(1.5).unwrap().regime(), Regime::Divergent);
        assert_eq!(OrliczFunction::power(1.0).unwrap().regime(), Regime::Divergent);
    }

    #[test]
    fn regime_of_slowly_varying_factor() {
        // rho_j = (1 + log(1 + 2^j))^-a varies by a factor of about 3.6^a on the window.
        assert_eq!(OrliczFunction::quad_log(1.0).unwrap().regime(), Regime::Bounded);
        assert_eq!(OrliczFunction::quad_log(6.0).unwrap().regime(), Regime::Vanishing);
    }

    #[test]
    fn rejects_invalid_functions() {
        assert!(OrliczFunction::power(0.5).is_err());
        assert!(OrliczFunction::custom("concave", |t: f64| t.sqrt()).is_err());
        assert!(OrliczFunction::custom("offset", |t: f64| t * t + 1.0).is_err());
        assert!(OrliczFunction::custom("nan", |t: f64| if t > 1.0 { f64::NAN } else { t * t }).is_err());
        assert!(OrliczFunction::custom("decreasing", |t: f64| -t).is_err());
        assert!(OrliczFunction::table(&[(1.0, 1.0), (2.0, 1.5)]).is_err());
    }

    #[test]
    fn table_interpolates_and_extends() {
        let phi = OrliczFunction::table(&[(1.0, 0.5), (2.0, 2.0)]).unwrap();
        assert_eq!(phi.eval(0.5), 0.25);
        assert_eq!(phi.eval(1.5), 1.25);
        assert_eq!(phi.eval(3.0), 3.5);
        assert_eq!(phi.regime(), Regime::Divergent);
        let json = serde_json::to_string(&phi).unwrap();
        assert_eq!(json, r#"{"family":"table","knots":[[0.0,0.0],[1.0,0.5],[2.0,2.0]]}"#);
    }

    #[test]
    fn spec_round_trip() {
        let phi: OrliczFunction = serde_json::from_str(r#"{"family":"power","p":3.0}"#).unwrap();
        assert_eq!(phi.power_exponent(), Some(3.0));
        let q: OrliczFunction = serde_json::from_str(r#"{"family":"quadlog","a":1.0}"#).unwrap();
        assert!((q.eval(0.5) - 0.25 / (1.0 + 3f64.ln())).abs() < 1e-15);
        assert!(serde_json::from_str::<OrliczFunction>(r#"{"family":"power","p":0.5}"#).is_err());
    }

    #[test]
    fn luxemburg_examples() {
        let two = OrliczFunction::power(2.0).unwrap();
        let r = luxemburg_norm(&two, &series(&[3.0, 4.0]), DEFAULT_REL_TOL).unwrap();
        assert!((r.value - 5.0).abs() <= 5.0 * DEFAULT_REL_TOL);
        let three = OrliczFunction::power(3.0).unwrap();
        let r = luxemburg_norm(&three, &series(&[2.0]), DEFAULT_REL_TOL).unwrap();
        assert!((r.value - 2.0).abs() <= 2.0 * DEFAULT_REL_TOL);
        assert_eq!(
            luxemburg_norm(&three, &CoefficientSeries::zero(), 1e-10).unwrap().value,
            0.0
        );
    }

    #[test]
    fn bracket_invariants() {
        let phi = OrliczFunction::quad_log(1.0).unwrap();
        let s = series(&[0.3, -1.2, 0.01, 2.5]);
        let r = luxemburg_norm(&phi, &s, 1e-10).unwrap();
        let (lo, hi) = r.bracket;
        assert!(hi - lo <= 1e-10 * r.value);
        let modular = |l: f64| s.coeffs().iter().map(|c| phi.eval(c.norm() / l)).sum::<f64>();
        assert!(modular(hi) <= 1.0);
        assert!(modular(lo) >= 1.0 - 1e-14);
        assert!((r.sum_at_value - modular(hi)).abs() < 1e-14);
    }

    #[test]
    fn generic_path_matches_power_fast_path() {
        let fast = OrliczFunction::power(3.0).unwrap();
        let slow = OrliczFunction::custom("cube", |t: f64| t * t * t).unwrap();
        let s = series(&[0.1, 0.7, -0.2, 0.05]);
        let a = luxemburg_norm(&fast, &s, 1e-12).unwrap().value;
        let b = luxemburg_norm(&slow, &s, 1e-12).unwrap().value;
        assert!((a - b).abs() < 4e-12 * a);
    }

    fn magnitudes() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 1..40).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-6))
    }

    proptest! {
        #[test]
        fn matches_lp_closed_form(xs in magnitudes(), p in 1.0f64..8.0) {
            let phi = OrliczFunction::power(p).unwrap();
            let r = luxemburg_norm(&phi, &series(&xs), 1e-10).unwrap();
            let exact = xs.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            prop_assert!((r.value - exact).abs() <= 1e-10 * exact * 1.01);
        }

        #[test]
        fn homogeneous(xs in magnitudes(), alpha in -5.0f64..5.0) {
            prop_assume!(alpha.abs() > 1e-3);
            let phi = OrliczFunction::quad_log(2.0).unwrap();
            let tol = 1e-10;
            let base = luxemburg_norm(&phi, &series(&xs), tol).unwrap().value;
            let scaled = luxemburg_norm(&phi, &series(&xs).scale(Complex64::new(alpha, 0.0)), tol).unwrap().value;
            prop_assert!((scaled - alpha.abs() * base).abs() <= 2.0 * tol * scaled);
        }

        #[test]
        fn triangle_inequality(xs in magnitudes(), ys in magnitudes(), p in 1.0f64..6.0) {
            let phi = OrliczFunction::power(p).unwrap();
            let tol = 1e-10;
            let a = series(&xs);
            let b = series(&ys);
            let mut sum = a.clone();
            sum.add_scaled(Complex64::new(1.0, 0.0), &b);
            let n = |s: &CoefficientSeries| luxemburg_norm(&phi, s, tol).unwrap().value;
            prop_assert!(n(&sum) <= (n(&a) + n(&b)) * (1.0 + 4.0 * tol));
        }

        #[test]
        fn translation_invariant(xs in magnitudes(), offset in 0usize..50) {
            let phi = OrliczFunction::quad_log(1.0).unwrap();
            let s = series(&xs);
            let a = luxemburg_norm(&phi, &s, 1e-10).unwrap();
            let b = luxemburg_norm(&phi, &s.shift(offset), 1e-10).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn modular_is_nonincreasing(xs in magnitudes(), l1 in 0.01f64..10.0, l2 in 0.01f64..10.0) {
            let phi = OrliczFunction::quad_log(1.0).unwrap();
            let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
            let modular = |l: f64| xs.iter().map(|x| phi.eval(x.abs() / l)).sum::<f64>();
            prop_assert!(modular(hi) <= modular(lo));
        }

        #[test]
        fn bounded_regime_equivalence(xs in magnitudes()) {
            // t^2 <= t^2 + t^3 <= 2 t^2 on [0, 1]: k_phi = 1, K_phi = sqrt(2).
            let phi = OrliczFunction::custom("t^2+t^3", |t: f64| t * t + t * t * t).unwrap();
            let s = series(&xs);
            let middle = luxemburg_norm(&phi, &s, 1e-12).unwrap().value.max(s.sup_coeff());
            let l2 = s.l2_norm();
            prop_assert!(l2 <= middle * (1.0 + 1e-12));
            prop_assert!(middle <= 2f64.sqrt() * l2 * (1.0 + 1e-12));
        }
    }
}
