//! Admissible translates: Fisher information, Hellinger affinities, the
//! Kakutani product criterion and the combined positivity decision.

use serde::Serialize;

use crate::analytic::{weighted_series, Positivity};
use crate::bounds::model_kurtosis;
use crate::error::{DepthError, Result};
use crate::models::{CoordinateLaw, Density, Family, Normalizer, Point, SequenceModel};
use crate::quadrature::Quadrature;
use crate::series::{compensated_sum, sum_series, sup_series, SeriesValue, TermTail};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherInformation {
    pub value: f64,
    pub abs_error: f64,
}

/// Required absolute accuracy of the Fisher-information integral.
pub const FISHER_TOLERANCE: f64 = 1e-6;

/// I(φ) = ∫ (φ′)²/φ.
pub fn fisher_information(phi: &Density) -> Result<FisherInformation> {
    if let Some(x) = phi.find_zero() {
        return Err(DepthError::DensityVanishes(x));
    }
    let (lo, hi) = phi.support();
    let q = Quadrature::with_tolerance(1e-10, 1e-12);
    let r = q.integrate_with_breaks(
        |x| {
            let p = phi.pdf(x);
            if p > 0.0 {
                let d = phi.dpdf(x);
                d * d / p
            } else {
                0.0
            }
        },
        lo,
        hi,
        &[0.0],
    )?;
    if r.abs_error > FISHER_TOLERANCE {
        return Err(DepthError::Quadrature {
            value: r.value,
            abs_error: r.abs_error,
        });
    }
    Ok(FisherInformation {
        value: r.value,
        abs_error: r.abs_error,
    })
}

fn shift_breaks(phi: &Density, shift: f64) -> Vec<f64> {
    let (lo, hi) = phi.support();
    [0.0, shift, lo, hi, lo + shift, hi + shift]
        .into_iter()
        .filter(|x| x.is_finite())
        .collect()
}

/// 1 − H(s) = ½∫(√φ(t) − √φ(t − s))² dt, accurate for small shifts where
/// 1 − ∫√(φ(t)φ(t − s)) would cancel.
pub fn hellinger_deficit(phi: &Density, shift: f64) -> Result<f64> {
    if shift == 0.0 {
        return Ok(0.0);
    }
    let q = Quadrature::with_tolerance(1e-15, 1e-10);
    let r = q.integrate_with_breaks(
        |t| {
            let d = phi.pdf(t).sqrt() - phi.pdf(t - shift).sqrt();
            d * d
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &shift_breaks(phi, shift),
    )?;
    Ok((0.5 * r.value).clamp(0.0, 1.0))
}

/// H(φ, φ(· − s)) = ∫√(φ(t)φ(t − s)) dt.
pub fn hellinger_affinity(phi: &Density, shift: f64) -> Result<f64> {
    if shift == 0.0 {
        return Ok(1.0);
    }
    let q = Quadrature::with_tolerance(1e-14, 1e-11);
    let direct = q
        .integrate_with_breaks(
            |t| (phi.pdf(t) * phi.pdf(t - shift)).sqrt(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &shift_breaks(phi, shift),
        )?
        .value;
    if direct < 0.5 {
        return Ok(direct.max(0.0));
    }
    Ok(1.0 - hellinger_deficit(phi, shift)?)
}

/// Explicit product terms evaluated past the head before the tail bound.
pub const KAKUTANI_EXPLICIT_TERMS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailCertificate {
    /// Finitely many nonzero shifts; the product is exact.
    Exact,
    /// 1 − H(s) ≤ constant·s² on the tail, with Σ_{tail} s² bounded above.
    QuadraticUpper { constant: f64, shift_sq_tail: f64 },
    /// 1 − H(s) ≥ constant·s² at the probes while Σ s² diverges.
    DivergentLower { constant: f64, probe: f64, reason: String },
    Undecided { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KakutaniProduct {
    /// Product estimate: explicit terms times the quadratic tail estimate.
    pub product: f64,
    /// Certified lower bound on the product.
    pub lower_bound: f64,
    pub positive: Positivity,
    pub explicit_terms: usize,
    pub deficit_sum: f64,
    pub tail: TailCertificate,
}

fn log_affinity(phi: &Density, shift: f64) -> Result<(f64, f64)> {
    let deficit = hellinger_deficit(phi, shift)?;
    if deficit < 0.5 {
        return Ok(((-deficit).ln_1p(), deficit));
    }
    let h = hellinger_affinity(phi, shift)?;
    Ok((h.ln(), 1.0 - h))
}

/// Π_k H(φ, φ(· − s_k)) for shifts `head` on k ≤ n0 followed by a tail whose
/// terms are |s_k|. The product is positive iff Σ(1 − H_k) < ∞.
pub fn kakutani_product(phi: &Density, head: &[f64], tail: &TermTail) -> Result<KakutaniProduct> {
    let n0 = head.len();
    let explicit_tail = match tail {
        TermTail::Zero => 0,
        _ => KAKUTANI_EXPLICIT_TERMS,
    };
    let shifts: Vec<f64> = head
        .iter()
        .copied()
        .chain((n0 + 1..=n0 + explicit_tail).map(|k| tail.term(k)))
        .collect();
    let mut logs = Vec::with_capacity(shifts.len());
    let mut deficits = Vec::with_capacity(shifts.len());
    for &s in &shifts {
        let (l, d) = log_affinity(phi, s)?;
        logs.push(l);
        deficits.push(d);
    }
    let log_explicit = compensated_sum(logs.iter().copied());
    let deficit_sum = compensated_sum(deficits.iter().copied());
    let n = shifts.len();
    let mut out = KakutaniProduct {
        product: log_explicit.exp(),
        lower_bound: log_explicit.exp(),
        positive: Positivity::Positive,
        explicit_terms: n,
        deficit_sum,
        tail: TailCertificate::Exact,
    };
    if log_explicit == f64::NEG_INFINITY {
        out.positive = Positivity::Zero;
        out.tail = TailCertificate::DivergentLower {
            constant: f64::INFINITY,
            probe: f64::NAN,
            reason: "a factor has zero affinity".into(),
        };
        return Ok(out);
    }
    let (weights, exponent) = match tail {
        TermTail::Zero => return Ok(out),
        TermTail::Opaque(_) => {
            out.positive = Positivity::Undecided;
            out.tail = TailCertificate::Undecided { reason: "opaque tail".into() };
            return Ok(out);
        }
        TermTail::Modulated { weights, exponent } => (weights, *exponent),
    };
    if weights.iter().all(|w| *w == 0.0) {
        return Ok(out);
    }
    let undecided = |mut out: KakutaniProduct, reason: String| {
        out.positive = Positivity::Undecided;
        out.tail = TailCertificate::Undecided { reason };
        out
    };
    let fisher = match fisher_information(phi) {
        Ok(f) => f.value + f.abs_error,
        Err(e) => return Ok(undecided(out, format!("Fisher information unavailable: {e}"))),
    };
    // Σ_{k>n} s_k², as a series whose first n terms vanish.
    let sq_tail = TermTail::Modulated {
        weights: weights.iter().map(|w| w * w).collect(),
        exponent: 2.0 * exponent,
    };
    let zeros = vec![0.0; n];
    match sum_series(&zeros, &sq_tail) {
        SeriesValue::Finite { value, abs_error } => {
            // 1 − H(s) ≤ I s²/8 for every s.
            let c = fisher / 8.0;
            let x_max = c * sup_series(&zeros, &sq_tail).unwrap_or(f64::INFINITY);
            if x_max >= 1.0 {
                return Ok(undecided(out, "tail shifts too large for the quadratic bound".into()));
            }
            let upper = value + abs_error;
            out.lower_bound = (log_explicit - c * upper / (1.0 - x_max)).exp();
            out.product = (log_explicit - c * value).exp();
            out.tail = TailCertificate::QuadraticUpper {
                constant: c,
                shift_sq_tail: value,
            };
            Ok(out)
        }
        SeriesValue::Divergent(_) => {
            // Probe 1 − H(s)/s² at the largest tail shift and geometrically
            // smaller ones; a positive floor makes Σ(1 − H_k) diverge with Σ s_k².
            let probe = (n + 1..=n + weights.len()).map(|k| tail.term(k)).fold(0.0, f64::max);
            let mut floor = f64::INFINITY;
            let mut s = probe;
            for _ in 0..12 {
                let d = hellinger_deficit(phi, s)?;
                floor = floor.min(d / (s * s));
                s *= 0.5;
            }
            if exponent >= 0.0 {
                // Shifts do not vanish: infinitely many factors stay below
                // 1 − (deficit at the smallest probe).
                let d0 = hellinger_deficit(phi, probe)?;
                if d0 > 0.0 {
                    return Ok(zero_product(out, d0, probe, "shifts do not vanish"));
                }
                return Ok(undecided(out, "probe deficit vanished".into()));
            }
            // Guard against probes that miss the quadratic regime entirely.
            if floor.is_finite() && floor >= fisher / 32.0 {
                Ok(zero_product(out, floor, probe, "sum of squared shifts diverges"))
            } else {
                Ok(undecided(out, format!("probe ratio {floor} too small to certify divergence")))
            }
        }
        SeriesValue::Undecided { .. } => Ok(undecided(out, "shift series undecided".into())),
    }
}

fn zero_product(mut out: KakutaniProduct, constant: f64, probe: f64, reason: &str) -> KakutaniProduct {
    out.product = 0.0;
    out.lower_bound = 0.0;
    out.positive = Positivity::Zero;
    out.tail = TailCertificate::DivergentLower {
        constant,
        probe,
        reason: reason.into(),
    };
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Assumptions {
    /// Finite kurtosis plus positive coordinate densities.
    #[serde(rename = "AI_AII")]
    MomentsAndDensity,
    /// Common density φ with finite Fisher information and variance.
    #[serde(rename = "AIII")]
    FisherDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Route {
    /// Finite Fisher information and Σ(t_k/λ_k)² < ∞ decide.
    SheppSeries,
    /// Finitely many shifts: the product is evaluated outright.
    KakutaniNumeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub kakutani_product: f64,
    pub kakutani_lower_bound: f64,
    pub fisher_information: f64,
    pub route: Route,
    pub tail: TailCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityDecision {
    pub verdict: Positivity,
    pub reason: String,
    pub series: Option<SeriesValue>,
    pub admissibility: Option<AdmissibilityVerdict>,
}

fn decision(verdict: Positivity, reason: impl Into<String>, series: Option<SeriesValue>) -> PositivityDecision {
    PositivityDecision {
        verdict,
        reason: reason.into(),
        series,
        admissibility: None,
    }
}

fn families(model: &SequenceModel) -> Vec<Family> {
    model
        .head()
        .iter()
        .map(|l| l.family().clone())
        .chain(model.tail_rule().map(|r| r.family.clone()))
        .collect()
}

fn has_positive_density(f: &Family) -> bool {
    match f {
        Family::Gaussian | Family::SymmetricStable { .. } => true,
        Family::Custom(d) => d.support() == (f64::NEG_INFINITY, f64::INFINITY) && d.find_zero().is_none(),
        Family::Rademacher | Family::Uniform { .. } => false,
    }
}

/// Whether HD(a) > 0, from divergence of the weighted series (zero) or
/// from the selected sufficient conditions (positive).
pub fn positivity_decision(a: &Point, model: &SequenceModel, assumptions: Assumptions) -> Result<PositivityDecision> {
    if !model.is_symmetric() {
        return Err(DepthError::SymmetryRequired("every coordinate law must be symmetric".into()));
    }
    let fams = families(model);
    let variance_ok = fams
        .iter()
        .all(|f| CoordinateLaw::new(f.clone(), 1.0).and_then(|l| l.variance()).is_ok());
    if !variance_ok {
        return Ok(decision(
            Positivity::Undecided,
            "a coordinate law has no variance: moment precondition fails",
            None,
        ));
    }
    let series = weighted_series(a, model)?;
    match &series {
        SeriesValue::Divergent(_) => return Ok(decision(Positivity::Zero, "weighted series diverges", Some(series))),
        SeriesValue::Undecided { .. } => {
            return Ok(decision(Positivity::Undecided, "weighted series undecided", Some(series)))
        }
        SeriesValue::Finite { .. } => {}
    }
    match assumptions {
        Assumptions::MomentsAndDensity => {
            if let Err(e) = model_kurtosis(model) {
                return Ok(decision(Positivity::Undecided, format!("kurtosis unavailable: {e}"), Some(series)));
            }
            if !fams.iter().all(has_positive_density) {
                return Ok(decision(
                    Positivity::Undecided,
                    "positive-density clause fails for a coordinate law",
                    Some(series),
                ));
            }
            Ok(decision(
                Positivity::Positive,
                "finite weighted series, finite kurtosis, positive densities",
                Some(series),
            ))
        }
        Assumptions::FisherDensity => {
            let first = fams[0].clone();
            if fams.iter().any(|f| *f != first) {
                return Ok(decision(Positivity::Undecided, "no common density", Some(series)));
            }
            let phi = match first {
                Family::Gaussian | Family::SymmetricStable { p: 2.0 } => Density::standard_normal(),
                Family::Custom(d) => d,
                _ => return Ok(decision(Positivity::Undecided, "coordinate law has no density", Some(series))),
            };
            let fisher = match fisher_information(&phi) {
                Ok(f) => f,
                Err(e) => {
                    return Ok(decision(Positivity::Undecided, format!("Fisher information: {e}"), Some(series)))
                }
            };
            let (abs_head, tail) = model.ratio_terms(a, 1.0, Normalizer::Scale)?;
            let head = abs_head
                .iter()
                .enumerate()
                .map(|(i, s)| s * a.value(i + 1).signum())
                .collect::<Vec<_>>();
            let kp = kakutani_product(&phi, &head, &tail)?;
            let route = if matches!(kp.tail, TailCertificate::Exact) {
                Route::KakutaniNumeric
            } else {
                Route::SheppSeries
            };
            let verdict = kp.positive;
            let reason = match verdict {
                Positivity::Positive => "a is an admissible translate",
                Positivity::Zero => "shifted product measure is singular",
                Positivity::Undecided => "Kakutani product undecided",
            };
            Ok(PositivityDecision {
                verdict,
                reason: reason.into(),
                series: Some(series),
                admissibility: Some(AdmissibilityVerdict {
                    admissible: verdict == Positivity::Positive,
                    kakutani_product: kp.product,
                    kakutani_lower_bound: kp.lower_bound,
                    fisher_information: fisher.value,
                    route,
                    tail: kp.tail,
                }),
            })
        }
    }
}
