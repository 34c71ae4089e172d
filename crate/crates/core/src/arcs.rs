//! Finite unions of half-open arcs of the unit circle, parametrized by angle.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of half-open angle intervals `[a, b)` in `[0, 2pi)`.
///
/// Arcs are kept sorted, pairwise disjoint and non-adjacent; an arc crossing
/// angle 0 is stored as two pieces. `measure` is the normalized Lebesgue
/// measure, total length over `2pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArcSet")]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
    measure: f64,
}

#[derive(Deserialize)]
struct RawArcSet {
    arcs: Vec<(f64, f64)>,
    #[serde(default)]
    measure: Option<f64>,
}

impl TryFrom<RawArcSet> for ArcSet {
    type Error = Error;

    fn try_from(raw: RawArcSet) -> Result<Self> {
        let set = ArcSet::new(&raw.arcs)?;
        if let Some(m) = raw.measure {
            if (m - set.measure).abs() > 1e-12 * set.measure.max(1.0) {
                return Err(Error::Validation(format!(
                    "stated measure {m} disagrees with the arcs (measure {})",
                    set.measure
                )));
            }
        }
        Ok(set)
    }
}

impl ArcSet {
    /// Builds the union of the given `[a, b)` intervals, reduced modulo `2pi`.
    ///
    /// Each interval needs `a <= b` and `b - a <= 2pi`; empty intervals are dropped.
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(intervals.len() + 1);
        for &(a, b) in intervals {
            if !a.is_finite() || !b.is_finite() || b < a || b - a > TAU * (1.0 + 1e-15) {
                return Err(Error::Validation(format!("invalid arc [{a}, {b})")));
            }
            if b - a >= TAU {
                pieces.push((0.0, TAU));
                continue;
            }
            if b == a {
                continue;
            }
            let start = a.rem_euclid(TAU);
            let end = start + (b - a);
            if end <= TAU {
                pieces.push((start, end));
            } else {
                pieces.push((start, TAU));
                pieces.push((0.0, end - TAU));
            }
        }
        Ok(Self::from_sorted_pieces(pieces))
    }

    fn from_sorted_pieces(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|&(a, b)| b > a);
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (a, b) in pieces {
            match arcs.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => arcs.push((a, b)),
            }
        }
        let measure = arcs.iter().map(|(a, b)| b - a).sum::<f64>() / TAU;
        ArcSet { arcs, measure }
    }

    pub fn empty() -> Self {
        ArcSet {
            arcs: Vec::new(),
            measure: 0.0,
        }
    }

    pub fn full() -> Self {
        ArcSet {
            arcs: vec![(0.0, TAU)],
            measure: 1.0,
        }
    }

    /// The single arc `[a, b)`.
    pub fn single(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Whether the set is one arc, possibly stored as two pieces across angle 0.
    pub fn as_single_arc(&self) -> Option<(f64, f64)> {
        match self.arcs.as_slice() {
            [(a, b)] => Some((*a, *b)),
            [(0.0, b), (c, d)] if *d == TAU => Some((*c, b + TAU)),
            _ => None,
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = theta.rem_euclid(TAU);
        let idx = self.arcs.partition_point(|&(a, _)| a <= t);
        idx > 0 && t < self.arcs[idx - 1].1
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a1, b1) = self.arcs[i];
            let (a2, b2) = other.arcs[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi > lo {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_sorted_pieces(out)
    }

    /// `count` independent uniform samples from the set.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        if self.arcs.is_empty() {
            return Vec::new();
        }
        let mut cumulative = Vec::with_capacity(self.arcs.len());
        let mut total = 0.0;
        for (a, b) in &self.arcs {
            total += b - a;
            cumulative.push(total);
        }
        (0..count)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                let idx = cumulative.partition_point(|&c| c <= u).min(self.arcs.len() - 1);
                let before = if idx == 0 { 0.0 } else { cumulative[idx - 1] };
                let (a, b) = self.arcs[idx];
                (a + (u - before)).min(b.next_down())
            })
            .collect()
    }
}
