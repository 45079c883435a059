//! Closed-form depth values: dual norms, the stable and Gaussian half-space
//! formulas, Brownian evaluation versus difference depths, the Rademacher
//! positivity classifier, and band / modified band depth.

use serde::{Serialize, Serializer};

use crate::error::{DepthError, Result};
use crate::models::{stable_cdf, CoordinateLaw, Direction, Family, Normalizer, Point, SequenceModel};
use crate::series::{sum_series, sup_series, DivergenceRecord, SeriesValue, TermTail};
use crate::special::{cauchy_sf, normal_sf};

/// ‖y‖_q with 1/p + 1/q = 1 for p > 1, and ‖y‖_∞ for p ≤ 1.
pub fn dual_norm(y: &[f64], p: f64) -> Result<f64> {
    let q = dual_exponent(p)?;
    if q.is_infinite() {
        return Ok(y.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(y.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q))
}

pub fn dual_exponent(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(DepthError::Domain(format!("p must be positive, got {p}")));
    }
    Ok(if p <= 1.0 { f64::INFINITY } else { p / (p - 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthValue {
    Value(f64),
    ZeroCertified,
    Undecided,
}

impl DepthValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            DepthValue::Value(v) => Some(*v),
            DepthValue::ZeroCertified => Some(0.0),
            DepthValue::Undecided => None,
        }
    }

    /// True for a closed-form value, which is mathematically positive even
    /// when it underflows.
    pub fn is_positive(&self) -> bool {
        matches!(self, DepthValue::Value(_))
    }
}

impl Serialize for DepthValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DepthValue::Value(v) => s.serialize_f64(*v),
            DepthValue::ZeroCertified => s.serialize_str("ZERO-CERTIFIED"),
            DepthValue::Undecided => s.serialize_str("UNDECIDED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    ClosedForm { formula: String, stderr: f64 },
    Divergence(DivergenceRecord),
    Witness { direction: Direction, reason: String },
    Undecided { reason: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Norms {
    /// ‖τ(a)/c‖_q for the model's dual exponent.
    pub dual: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthReport {
    pub value: DepthValue,
    pub certificate: Certificate,
    pub series: Option<SeriesValue>,
    pub norms: Norms,
}

/// Σ t_k(a)²/σ_k², with σ_k the standard deviation (or scale for laws
/// without variance).
pub fn weighted_series(a: &Point, model: &SequenceModel) -> Result<SeriesValue> {
    let (head, tail) = model.ratio_terms(a, 2.0, Normalizer::SeriesScale)?;
    Ok(sum_series(&head, &tail))
}

fn common_index(model: &SequenceModel) -> Result<f64> {
    let mut indices = model
        .head()
        .iter()
        .map(|l| l.family().clone())
        .chain(model.tail_rule().map(|r| r.family.clone()))
        .map(|f| {
            f.stability_index()
                .ok_or_else(|| DepthError::HeterogeneousModel(format!("{} is not stable", f.name())))
        });
    let first = indices.next().expect("model has a law")?;
    for p in indices {
        let p = p?;
        if p != first {
            return Err(DepthError::HeterogeneousModel(format!(
                "stability indices {first} and {p} are mixed"
            )));
        }
    }
    Ok(first)
}

/// 1 − P(S > x) for the model's base stable variable, with standard error.
pub(crate) fn stable_sf(p: f64, x: f64) -> (f64, f64) {
    if p == 2.0 {
        (normal_sf(x), 0.0)
    } else if p == 1.0 {
        (cauchy_sf(x), 0.0)
    } else {
        let (f, se) = stable_cdf(p, x);
        (1.0 - f, se)
    }
}

/// Half-space depth 1 − P(S ≤ ‖τ(a)/c‖_q) under a symmetric p-stable model.
pub fn stable_depth(a: &Point, model: &SequenceModel) -> Result<DepthReport> {
    let p = common_index(model)?;
    let q = dual_exponent(p)?;
    let formula = format!("1 - P(S <= ||tau(a)/c||_q), p = {p}");
    let norm = if q.is_infinite() {
        let (head, tail) = model.ratio_terms(a, 1.0, Normalizer::Scale)?;
        match sup_series(&head, &tail) {
            None => {
                return Ok(undecided("opaque tail: supremum not decidable", None, Some(q)));
            }
            Some(s) if s.is_infinite() => {
                return Ok(zero_by_divergence(
                    DivergenceRecord {
                        reason: "sup_k |t_k(a)/c_k| is unbounded".into(),
                        partial_sum: f64::INFINITY,
                        terms: head.len(),
                    },
                    None,
                    q,
                ));
            }
            Some(s) => s,
        }
    } else {
        let (head, tail) = model.ratio_terms(a, q, Normalizer::Scale)?;
        let series = sum_series(&head, &tail);
        match &series {
            SeriesValue::Finite { value, .. } => value.powf(1.0 / q),
            SeriesValue::Divergent(rec) => return Ok(zero_by_divergence(rec.clone(), Some(series.clone()), q)),
            SeriesValue::Undecided { .. } => {
                return Ok(undecided("opaque tail: series not decidable", Some(series), Some(q)))
            }
        }
    };
    let (value, stderr) = stable_sf(p, norm);
    Ok(DepthReport {
        value: DepthValue::Value(value),
        certificate: Certificate::ClosedForm { formula, stderr },
        series: None,
        norms: Norms {
            dual: Some(norm),
            q: Some(q),
        },
    })
}

fn zero_by_divergence(rec: DivergenceRecord, series: Option<SeriesValue>, q: f64) -> DepthReport {
    DepthReport {
        value: DepthValue::ZeroCertified,
        certificate: Certificate::Divergence(rec),
        series,
        norms: Norms {
            dual: Some(f64::INFINITY),
            q: Some(q),
        },
    }
}

fn undecided(reason: &str, series: Option<SeriesValue>, q: Option<f64>) -> DepthReport {
    DepthReport {
        value: DepthValue::Undecided,
        certificate: Certificate::Undecided { reason: reason.into() },
        series,
        norms: Norms { dual: None, q },
    }
}

/// 1 − Φ(‖a‖_μ) on a diagonal Gaussian model, ‖a‖_μ² = Σ t_k²/σ_k².
pub fn gaussian_sequence_depth(a: &Point, model: &SequenceModel) -> Result<DepthReport> {
    let gaussian = |f: &Family| matches!(f, Family::Gaussian);
    if !model.head().iter().all(|l| gaussian(l.family()))
        || !model.tail_rule().is_none_or(|r| gaussian(&r.family))
    {
        return Err(DepthError::HeterogeneousModel("non-Gaussian law present".into()));
    }
    let series = weighted_series(a, model)?;
    Ok(match &series {
        SeriesValue::Finite { value, .. } => {
            let norm = value.sqrt();
            DepthReport {
                value: DepthValue::Value(normal_sf(norm)),
                certificate: Certificate::ClosedForm {
                    formula: "1 - Phi(||a||_mu)".into(),
                    stderr: 0.0,
                },
                series: Some(series.clone()),
                norms: Norms {
                    dual: Some(norm),
                    q: Some(2.0),
                },
            }
        }
        SeriesValue::Divergent(rec) => zero_by_divergence(rec.clone(), Some(series.clone()), 2.0),
        SeriesValue::Undecided { .. } => undecided("opaque tail: series not decidable", Some(series), Some(2.0)),
    })
}

/// A function sampled on a strictly increasing grid covering [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(DepthError::Domain("grid needs ≥ 2 points and matching values".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(DepthError::Domain("grid must be strictly increasing".into()));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(DepthError::Domain("grid must start at 0 and end at 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DepthError::Domain("grid values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a grid node, matched to within 1e-12.
    pub fn at(&self, t: f64) -> Option<f64> {
        let i = self.grid.partition_point(|g| *g < t - 1e-12);
        (i < self.grid.len() && (self.grid[i] - t).abs() <= 1e-12).then(|| self.values[i])
    }

    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }
}

fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
        .sum()
}

/// Grid containing 0, 1 and every 1/k for k ≤ k_max + 1, refined by
/// `uniform` equally spaced interior points.
pub fn harmonic_grid(k_max: usize, uniform: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (1..=k_max + 1).map(|k| 1.0 / k as f64).collect();
    g.push(0.0);
    g.extend((1..uniform).map(|i| i as f64 / uniform as f64));
    g.sort_by(|a, b| a.total_cmp(b));
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    g
}

pub const DEFAULT_K_MAX: usize = 64;
/// Normalized differences beyond this give a depth below 1e-300.
pub const DIFF_OVERFLOW: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrownianDepths {
    pub eval_depth: f64,
    pub diff_depth: f64,
    /// sup_k √(k(k+1))·(a(1/k) − a(1/(k+1))) and where it was attained.
    pub diff_sup: f64,
    pub diff_argmax: usize,
}

/// Depths of `a` under Brownian motion started at an independent N(0,1):
/// over the evaluation maps a ↦ a(t) and over the normalized differences
/// a(1/k) − a(1/(k+1)).
pub fn brownian_depths(a: &GridFunction, k_max: usize) -> Result<BrownianDepths> {
    if k_max == 0 {
        return Err(DepthError::Domain("k_max must be at least 1".into()));
    }
    let needed: Vec<f64> = (1..=k_max + 1).map(|k| 1.0 / k as f64).collect();
    let missing: Vec<f64> = needed.iter().copied().filter(|t| a.at(*t).is_none()).collect();
    if !missing.is_empty() {
        return Err(DepthError::MissingGridPoints(missing));
    }
    let eval_depth = a
        .grid
        .iter()
        .zip(&a.values)
        .map(|(t, v)| normal_sf(v / (1.0 + t).sqrt()))
        .fold(1.0, f64::min);
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = 1;
    for k in 1..=k_max {
        let kf = k as f64;
        let diff = a.at(needed[k - 1]).expect("checked") - a.at(needed[k]).expect("checked");
        let z = (kf * (kf + 1.0)).sqrt() * diff;
        if z > sup {
            sup = z;
            argmax = k;
        }
    }
    let diff_depth = if sup > DIFF_OVERFLOW { 0.0 } else { normal_sf(sup) };
    Ok(BrownianDepths {
        eval_depth,
        diff_depth,
        diff_sup: sup,
        diff_argmax: argmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Positivity {
    Positive,
    Zero,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RademacherClass {
    pub verdict: Positivity,
    pub reason: String,
    pub witness: Option<Direction>,
    pub sup: Option<f64>,
    pub sum_squares: SeriesValue,
}

/// Zero iff sup_k |t_k(a)| > 1 or Σ t_k(a)² = ∞ under i.i.d. signs.
pub fn rademacher_classify(a: &Point) -> Result<RademacherClass> {
    let model = SequenceModel::rademacher();
    let (abs_head, abs_tail) = model.ratio_terms(a, 1.0, Normalizer::Scale)?;
    let (sq_head, sq_tail) = model.ratio_terms(a, 2.0, Normalizer::Scale)?;
    let sum_squares = sum_series(&sq_head, &sq_tail);
    let sup = sup_series(&abs_head, &abs_tail);
    if let Some(s) = sup {
        if s > 1.0 {
            let k = first_exceeding(a, &abs_head, &abs_tail);
            let sign = a.value(k).signum();
            return Ok(RademacherClass {
                verdict: Positivity::Zero,
                reason: "sup > 1".into(),
                witness: Some(Direction::new([(k, sign)])?),
                sup: Some(s),
                sum_squares,
            });
        }
    }
    let (verdict, reason) = match (&sum_squares, sup) {
        (SeriesValue::Divergent(_), _) => (Positivity::Zero, "sum of squares diverges"),
        (SeriesValue::Finite { .. }, Some(_)) => (Positivity::Positive, "sum of squares finite and sup <= 1"),
        _ => (Positivity::Undecided, "opaque tail"),
    };
    Ok(RademacherClass {
        verdict,
        reason: reason.into(),
        witness: None,
        sup,
        sum_squares,
    })
}

fn first_exceeding(a: &Point, head: &[f64], tail: &TermTail) -> usize {
    if let Some(i) = head.iter().position(|v| *v > 1.0) {
        return i + 1;
    }
    let n0 = head.len();
    if let TermTail::Modulated { weights, exponent } = tail {
        if *exponent > 0.0 {
            // Every residue class with a positive weight eventually exceeds 1.
            let w = weights.iter().copied().fold(0.0, f64::max);
            let start = ((1.0 / w).powf(1.0 / exponent).ceil() as usize).max(n0 + 1);
            return (start..).find(|&k| a.value(k).abs() > 1.0).expect("unbounded tail");
        }
    }
    (n0 + 1..).find(|&k| a.value(k).abs() > 1.0).expect("sup exceeds 1")
}

/// A distribution function with an optional left limit (for atoms).
pub trait UnivariateCdf {
    fn cdf(&self, x: f64) -> f64;
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl UnivariateCdf for CoordinateLaw {
    fn cdf(&self, x: f64) -> f64 {
        CoordinateLaw::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        CoordinateLaw::cdf_left(self, x)
    }
}

/// A continuous distribution function given as a closure.
pub struct ContinuousCdf<F>(pub F);

impl<F: Fn(f64) -> f64> UnivariateCdf for ContinuousCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// P(min ≤ b ≤ max) over r i.i.d. draws. The band misses b when every draw
/// lies strictly below it or strictly above it, so the value is
/// 1 − F(b⁻)^r − (1 − F(b))^r; at continuity points F(b⁻) = F(b).
pub fn band_depth_1d(b: f64, cdf: &impl UnivariateCdf, r: u32) -> Result<f64> {
    if r < 2 {
        return Err(DepthError::Domain(format!("band depth needs r ≥ 2, got {r}")));
    }
    let f = cdf.cdf(b);
    let fl = cdf.cdf_left(b);
    Ok((1.0 - fl.powi(r as i32) - (1.0 - f).powi(r as i32)).max(0.0))
}

/// Average over consecutive groups of r paths of the trapezoid measure of
/// {t : min_j X_j(t) ≤ a(t) ≤ max_j X_j(t)}.
pub fn modified_band_depth(a: &GridFunction, paths: &[GridFunction], r: usize) -> Result<f64> {
    if r < 2 {
        return Err(DepthError::Domain(format!("band depth needs r ≥ 2, got {r}")));
    }
    if paths.is_empty() || !paths.len().is_multiple_of(r) {
        return Err(DepthError::Domain(format!(
            "{} sample paths do not split into groups of {r}",
            paths.len()
        )));
    }
    if paths.iter().any(|p| p.grid != a.grid) {
        return Err(DepthError::Domain("sample paths must share the grid of a".into()));
    }
    let groups = paths.len() / r;
    let mut inside = vec![0.0; a.grid.len()];
    let total: f64 = paths
        .chunks(r)
        .map(|group| {
            for (i, slot) in inside.iter_mut().enumerate() {
                let (lo, hi) = group.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p.values[i]), hi.max(p.values[i]))
                });
                let v = a.values[i];
                *slot = if lo <= v && v <= hi { 1.0 } else { 0.0 };
            }
            trapezoid(&a.grid, &inside)
        })
        .sum();
    Ok(total / groups as f64)
}
