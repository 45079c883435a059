//! Candidate points τ(a) and finitely supported directions α ∈ ℓ₀.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{DepthError, Result};

/// Coordinates of a point beyond its explicit head.
#[derive(Clone)]
pub enum Tail {
    Zero,
    /// t_k = coef · k^exponent.
    PowerLaw { coef: f64, exponent: f64 },
    /// t_k = pattern[(k-1) mod L], indexed from the first coordinate.
    Periodic(Vec<f64>),
    /// Arbitrary rule with no analytic handle; series over it are undecided.
    Opaque(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Zero => write!(f, "Zero"),
            Tail::PowerLaw { coef, exponent } => write!(f, "PowerLaw({coef}·k^{exponent})"),
            Tail::Periodic(p) => write!(f, "Periodic({p:?})"),
            Tail::Opaque(_) => write!(f, "Opaque"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Point {
    coords: Vec<f64>,
    tail: Tail,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::with_tail(coords, Tail::Zero)
    }

    pub fn with_tail(coords: Vec<f64>, tail: Tail) -> Result<Self> {
        if let Some(x) = coords.iter().find(|x| !x.is_finite()) {
            return Err(DepthError::Domain(format!("point coordinate {x} is not finite")));
        }
        match &tail {
            Tail::PowerLaw { coef, exponent } if !coef.is_finite() || !exponent.is_finite() => {
                return Err(DepthError::Domain("power-law tail must be finite".into()))
            }
            Tail::Periodic(p) if p.is_empty() || p.iter().any(|x| !x.is_finite()) => {
                return Err(DepthError::Domain("periodic tail needs finite entries".into()))
            }
            _ => {}
        }
        Ok(Self { coords, tail })
    }

    pub fn zero() -> Self {
        Self {
            coords: Vec::new(),
            tail: Tail::Zero,
        }
    }

    /// t_k = coef · k^exponent for every k ≥ 1.
    pub fn power_law(coef: f64, exponent: f64) -> Result<Self> {
        Self::with_tail(Vec::new(), Tail::PowerLaw { coef, exponent })
    }

    /// (a₁,…,a_d, a₁,…,a_d, …).
    pub fn periodic(pattern: Vec<f64>) -> Result<Self> {
        Self::with_tail(pattern.clone(), Tail::Periodic(pattern))
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// t_k(a), 1-based.
    pub fn value(&self, k: usize) -> f64 {
        assert!(k >= 1, "coordinates are 1-based");
        if k <= self.coords.len() {
            return self.coords[k - 1];
        }
        match &self.tail {
            Tail::Zero => 0.0,
            Tail::PowerLaw { coef, exponent } => coef * (k as f64).powf(*exponent),
            Tail::Periodic(p) => p[(k - 1) % p.len()],
            Tail::Opaque(f) => f(k),
        }
    }

    /// (t_1(a), …, t_K(a)).
    pub fn head(&self, k: usize) -> Vec<f64> {
        (1..=k).map(|i| self.value(i)).collect()
    }

    pub fn tail_is_zero(&self) -> bool {
        match &self.tail {
            Tail::Zero => true,
            Tail::PowerLaw { coef, .. } => *coef == 0.0,
            Tail::Periodic(p) => p.iter().all(|x| *x == 0.0),
            Tail::Opaque(_) => false,
        }
    }

    /// Finite support length when the tail vanishes.
    pub fn support_len(&self) -> Option<usize> {
        if !self.tail_is_zero() {
            return None;
        }
        Some(
            self.coords
                .iter()
                .rposition(|x| *x != 0.0)
                .map_or(0, |i| i + 1),
        )
    }

    pub fn is_origin(&self) -> bool {
        self.support_len() == Some(0)
    }
}

/// A finitely supported coefficient vector α; indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    support: Vec<usize>,
    coeffs: Vec<f64>,
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self
            .support
            .iter()
            .zip(&self.coeffs)
            .map(|(k, c)| (k.to_string(), *c))
            .collect();
        map.serialize(s)
    }
}

impl Direction {
    /// Builds α from (index, coefficient) pairs, summing repeated indices and
    /// dropping zeros.
    pub fn new(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (k, c) in pairs {
            if k == 0 {
                return Err(DepthError::Domain("direction indices are 1-based".into()));
            }
            if !c.is_finite() {
                return Err(DepthError::Domain(format!("coefficient {c} is not finite")));
            }
            *merged.entry(k).or_insert(0.0) += c;
        }
        let (support, coeffs): (Vec<_>, Vec<_>) = merged.into_iter().filter(|(_, c)| *c != 0.0).unzip();
        if support.is_empty() {
            return Err(DepthError::Domain("direction has empty support".into()));
        }
        Ok(Self { support, coeffs })
    }

    /// The coordinate functional t_k.
    pub fn coordinate(k: usize) -> Result<Self> {
        Self::new([(k, 1.0)])
    }

    /// Dense coefficients on 1..=len, zeros skipped.
    pub fn dense(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().enumerate().map(|(i, c)| (i + 1, *c)))
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_index(&self) -> usize {
        *self.support.last().expect("nonempty support")
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// α + β, or `None` when the sum cancels to zero.
    pub fn add(&self, other: &Direction) -> Option<Direction> {
        Direction::new(self.iter().chain(other.iter())).ok()
    }

    pub fn scaled(&self, f: f64) -> Result<Direction> {
        Direction::new(self.iter().map(|(k, c)| (k, c * f)))
    }

    /// t_α(a) = Σ α_k t_k(a), reading the point's tail where needed.
    pub fn apply_point(&self, a: &Point) -> f64 {
        self.iter().map(|(k, c)| c * a.value(k)).sum()
    }

    /// t_α applied to a finite coordinate row; indices beyond the row are an
    /// error.
    pub fn apply_row(&self, row: &[f64]) -> Result<f64> {
        let m = self.max_index();
        if m > row.len() {
            return Err(DepthError::DirectionOutOfRange {
                index: m,
                width: row.len(),
            });
        }
        Ok(self.apply_row_unchecked(row))
    }

    pub(crate) fn apply_row_unchecked(&self, row: &[f64]) -> f64 {
        self.iter().map(|(k, c)| c * row[k - 1]).sum()
    }
}
