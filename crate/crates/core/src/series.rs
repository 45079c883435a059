//! Certified sums of nonnegative series whose tail is a periodically
//! modulated power law `w[(k-1) mod L] · k^s`.
//!
//! Convergence is decided by the integral test, never by truncation alone.
//! An opaque tail is summed to a fixed depth and reported as undecided.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Explicit terms summed past the head before the analytic remainder.
pub const EXPLICIT_TERMS: usize = 65_536;

#[derive(Clone)]
pub enum TermTail {
    Zero,
    /// term(k) = weights[(k-1) % L] · k^exponent, weights ≥ 0.
    Modulated { weights: Vec<f64>, exponent: f64 },
    Opaque(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for TermTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermTail::Zero => write!(f, "Zero"),
            TermTail::Modulated { weights, exponent } => f
                .debug_struct("Modulated")
                .field("weights", weights)
                .field("exponent", exponent)
                .finish(),
            TermTail::Opaque(_) => write!(f, "Opaque"),
        }
    }
}

impl TermTail {
    pub fn term(&self, k: usize) -> f64 {
        match self {
            TermTail::Zero => 0.0,
            TermTail::Modulated { weights, exponent } => {
                weights[(k - 1) % weights.len()] * (k as f64).powf(*exponent)
            }
            TermTail::Opaque(f) => f(k),
        }
    }

    fn is_null(&self) -> bool {
        match self {
            TermTail::Zero => true,
            TermTail::Modulated { weights, .. } => weights.iter().all(|w| *w == 0.0),
            TermTail::Opaque(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRecord {
    pub reason: String,
    pub partial_sum: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SeriesValue {
    Finite { value: f64, abs_error: f64 },
    Divergent(DivergenceRecord),
    Undecided { partial_sum: f64, terms: usize },
}

impl SeriesValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            SeriesValue::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, SeriesValue::Divergent(_))
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Bracket for Σ_{k>n} k^s with s < −1 by the integral test.
fn power_tail_bracket(n: usize, s: f64) -> (f64, f64) {
    let e = s + 1.0;
    let lo = ((n + 1) as f64).powf(e) / -e;
    let hi = (n as f64).powf(e) / -e;
    (lo, hi)
}

/// Σ_{k≥1} of `head` on 1..=n0 followed by `tail` for k > n0.
pub fn sum_series(head: &[f64], tail: &TermTail) -> SeriesValue {
    let n0 = head.len();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let add = |x: f64, sum: &mut f64, comp: &mut f64| {
        // Neumaier summation.
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    };
    for &x in head {
        if x.is_infinite() {
            return SeriesValue::Divergent(DivergenceRecord {
                reason: "infinite term".into(),
                partial_sum: f64::INFINITY,
                terms: n0,
            });
        }
        add(x, &mut sum, &mut comp);
    }
    if tail.is_null() {
        return SeriesValue::Finite {
            value: sum + comp,
            abs_error: 4.0 * f64::EPSILON * (sum.abs() + n0 as f64 * f64::EPSILON),
        };
    }
    let last = n0 + EXPLICIT_TERMS;
    for k in n0 + 1..=last {
        add(tail.term(k), &mut sum, &mut comp);
    }
    let partial = sum + comp;
    match tail {
        TermTail::Zero => unreachable!(),
        TermTail::Opaque(_) => SeriesValue::Undecided {
            partial_sum: partial,
            terms: last,
        },
        TermTail::Modulated { weights, exponent } => {
            let s = *exponent;
            if s >= -1.0 {
                return SeriesValue::Divergent(DivergenceRecord {
                    reason: format!(
                        "integral test: terms are a positive multiple of k^{s} on a residue class, s >= -1"
                    ),
                    partial_sum: partial,
                    terms: last,
                });
            }
            let mean = weights.iter().sum::<f64>() / weights.len() as f64;
            let spread = weights
                .iter()
                .map(|w| (w - mean).abs())
                .fold(0.0, f64::max);
            let (lo, hi) = power_tail_bracket(last, s);
            // Abel summation bounds the oscillating part by the first term
            // times the largest partial sum of (w − mean) over one period.
            let oscillation = spread * weights.len() as f64 * ((last + 1) as f64).powf(s);
            let value = partial + mean * 0.5 * (lo + hi);
            let abs_error = mean * 0.5 * (hi - lo)
                + oscillation
                + 8.0 * f64::EPSILON * value.abs();
            SeriesValue::Finite { value, abs_error }
        }
    }
}

/// sup_k of the head and a tail of the same modulated form. Returns ∞ for
/// unbounded power-law tails and `None` for opaque tails.
pub fn sup_series(head: &[f64], tail: &TermTail) -> Option<f64> {
    let n0 = head.len();
    let head_max = head.iter().copied().fold(0.0, f64::max);
    let tail_max = match tail {
        TermTail::Zero => 0.0,
        TermTail::Opaque(_) => return None,
        TermTail::Modulated { weights, exponent } => {
            if weights.iter().all(|w| *w == 0.0) {
                0.0
            } else if *exponent > 0.0 {
                f64::INFINITY
            } else {
                // Each residue class is nonincreasing, so its first tail
                // term is its supremum.
                (n0 + 1..=n0 + weights.len())
                    .map(|k| tail.term(k))
                    .fold(0.0, f64::max)
            }
        }
    };
    Some(head_max.max(tail_max))
}
