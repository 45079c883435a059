//! Certified bounds on half-space depth: Markov witnesses that force depth
//! to zero, Paley–Zygmund lower bounds from fourth moments, lower bounds for
//! Rademacher sums, and the K-functional that controls their tails.

use serde::Serialize;

use crate::analytic::weighted_series;
use crate::error::{DepthError, Result};
use crate::export::csv_string;
use crate::models::rng::cell_rng;
use crate::models::{Direction, Normalizer, Point, SequenceModel};
use crate::series::{sum_series, sup_series, SeriesValue};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decay {
    /// Σ t_k²/σ_k² diverges, so B_m → 0.
    Vanishing,
    /// B_m decreases to 1/Σ t_k²/σ_k² > 0.
    NonVanishing { limit: f64 },
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCertificate {
    pub depths: Vec<usize>,
    pub witnesses: Vec<Direction>,
    pub bound_values: Vec<f64>,
    pub decay: Decay,
}

impl ZeroCertificate {
    /// (m, B_m) rows as CSV.
    pub fn to_csv(&self) -> Result<String> {
        csv_string(
            &["m", "bound"],
            self.depths.iter().zip(&self.bound_values).map(|(m, b)| [m.to_string(), format!("{b:e}")]),
        )
    }
}

/// Markov's bound P(t_α(X) ≥ t_α(a)) ≤ Var t_α(X) / t_α(a)² for a witness
/// with t_α(a) > 0 and centered, uncorrelated coordinates.
pub fn markov_bound(dir: &Direction, a: &Point, model: &SequenceModel) -> Result<f64> {
    let mut var = 0.0;
    for (k, c) in dir.iter() {
        var += c * c * model.law(k)?.variance()?;
    }
    let shift = dir.apply_point(a);
    if !(shift > 0.0) {
        return Err(DepthError::NoWitness(format!("t_alpha(a) = {shift} is not positive")));
    }
    Ok(var / (shift * shift))
}

/// The witness α_k = t_k(a)/σ_k² on k ≤ m with its Markov bound, or `None`
/// when t_k(a) = 0 for every k ≤ m.
pub fn markov_witness(a: &Point, model: &SequenceModel, m: usize) -> Result<Option<(Direction, f64)>> {
    let mut pairs = Vec::with_capacity(m);
    for k in 1..=m {
        let t = a.value(k);
        if t != 0.0 {
            pairs.push((k, t / model.law(k)?.variance()?));
        }
    }
    if pairs.is_empty() {
        return Ok(None);
    }
    let dir = Direction::new(pairs)?;
    let b = markov_bound(&dir, a, model)?;
    Ok(Some((dir, b)))
}

/// Markov witnesses at each requested depth m, with B_m = 1/Σ_{k≤m} t_k²/σ_k².
pub fn markov_zero_certificate(a: &Point, model: &SequenceModel, depths: &[usize]) -> Result<ZeroCertificate> {
    let mut cert = ZeroCertificate {
        depths: Vec::new(),
        witnesses: Vec::new(),
        bound_values: Vec::new(),
        decay: Decay::Undetermined,
    };
    let mut sorted = depths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for m in sorted {
        if let Some((dir, b)) = markov_witness(a, model, m)? {
            cert.depths.push(m);
            cert.witnesses.push(dir);
            cert.bound_values.push(b);
        }
    }
    if cert.depths.is_empty() {
        return Err(DepthError::NoWitness("t_k(a) = 0 at every requested depth".into()));
    }
    cert.decay = match weighted_series(a, model)? {
        SeriesValue::Divergent(_) => Decay::Vanishing,
        SeriesValue::Finite { value, .. } => Decay::NonVanishing { limit: 1.0 / value },
        SeriesValue::Undecided { .. } => Decay::Undetermined,
    };
    Ok(cert)
}

/// sup_k E t_k⁴ / (E t_k²)² over the model.
pub fn model_kurtosis(model: &SequenceModel) -> Result<f64> {
    let mut c: f64 = 0.0;
    for law in model.head() {
        c = c.max(law.kurtosis()?);
    }
    if let Some(rule) = model.tail_rule() {
        c = c.max(crate::models::CoordinateLaw::new(rule.family.clone(), 1.0)?.kurtosis()?);
    }
    Ok(c)
}

/// (E S²)² / E S⁴ for S = t_α(X), from analytic moments of independent
/// centered coordinates. At least 1/(3c).
pub fn fourth_moment_ratio(model: &SequenceModel, dir: &Direction) -> Result<f64> {
    let (mut s2, mut s4, mut sq2) = (0.0, 0.0, 0.0);
    for (k, c) in dir.iter() {
        let law = model.law(k)?;
        let mean = law.mean();
        if mean.abs() > 1e-12 * law.scale() {
            return Err(DepthError::Domain(format!("coordinate {k} is not centered (mean {mean})")));
        }
        let m = law.moments()?;
        let c2 = c * c;
        s2 += c2 * m.second;
        s4 += c2 * c2 * m.fourth;
        sq2 += c2 * c2 * m.second * m.second;
    }
    let fourth = s4 + 3.0 * (s2 * s2 - sq2);
    Ok(s2 * s2 / fourth)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerBoundKind {
    /// Paley–Zygmund with margin δ and kurtosis constant c.
    Pz { delta: f64, c: f64 },
    /// Tail split at r with coordinate bound δ = 1/(4√r).
    TailSplit { r: usize, delta: f64 },
    /// Rademacher-sum tail bound with constant c at level t0.
    Ms { c: f64, t0: f64, suspect: bool, brute_force_upper: Option<f64> },
    /// Depth of the projection onto the first d coordinates.
    Proj { d: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    #[serde(flatten)]
    pub kind: LowerBoundKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Applicability {
    Applicable(LowerBoundReport),
    NotApplicable { reason: String },
}

impl Applicability {
    pub fn report(&self) -> Option<&LowerBoundReport> {
        match self {
            Applicability::Applicable(r) => Some(r),
            Applicability::NotApplicable { .. } => None,
        }
    }

    fn not(reason: impl Into<String>) -> Self {
        Applicability::NotApplicable { reason: reason.into() }
    }
}

/// (2δ − δ²)² / (6c).
pub fn pz_lower_bound(delta: f64, c: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DepthError::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(c >= 1.0) {
        return Err(DepthError::Domain(format!("kurtosis constant must be ≥ 1, got {c}")));
    }
    let g = 2.0 * delta - delta * delta;
    Ok(g * g / (6.0 * c))
}

/// Paley–Zygmund bound at a point: with S = Σ t_k²/σ_k² < 1 the largest
/// admissible margin is δ just below 1 − √S.
pub fn pz_point_bound(a: &Point, model: &SequenceModel) -> Result<Applicability> {
    let c = match model_kurtosis(model) {
        Ok(c) => c,
        Err(e) => return Ok(Applicability::not(e.to_string())),
    };
    let (s, err) = match weighted_series(a, model)? {
        SeriesValue::Finite { value, abs_error } => (value, abs_error),
        SeriesValue::Divergent(_) => return Ok(Applicability::not("weighted series diverges")),
        SeriesValue::Undecided { .. } => return Ok(Applicability::not("weighted series undecided")),
    };
    let room = 1.0 - (s + err).sqrt();
    if !(room > 0.0) {
        return Ok(Applicability::not(format!("weighted series {s} is not below 1")));
    }
    let delta = room * (1.0 - 1e-9);
    Ok(Applicability::Applicable(LowerBoundReport {
        kind: LowerBoundKind::Pz { delta, c },
        value: pz_lower_bound(delta, c)?,
    }))
}

/// Iteration cap for the split search.
const SPLIT_SEARCH_LIMIT: usize = 100_000_000;

/// Rademacher bound 3/32: find r with Σ_{k>r} t_k(a)² ≤ 1/4 and
/// sup_k |t_k(a)| ≤ δ for some δ with δ√r ≤ 1/4. The best δ is 1/(4√r) and
/// the tail sum decreases in r, so the smallest feasible r decides.
pub fn tail_split_lower_bound(a: &Point) -> Result<Applicability> {
    let model = SequenceModel::rademacher();
    let (abs_head, abs_tail) = model.ratio_terms(a, 1.0, Normalizer::Scale)?;
    let (sq_head, sq_tail) = model.ratio_terms(a, 2.0, Normalizer::Scale)?;
    let Some(sup) = sup_series(&abs_head, &abs_tail) else {
        return Ok(Applicability::not("opaque tail"));
    };
    let (total, err) = match sum_series(&sq_head, &sq_tail) {
        SeriesValue::Finite { value, abs_error } => (value, abs_error),
        _ => return Ok(Applicability::not("sum of squares is not finite")),
    };
    let r_max = if sup == 0.0 { usize::MAX } else { (1.0 / (16.0 * sup * sup)).floor().min(1e18) as usize };
    if r_max == 0 {
        return Ok(Applicability::not(format!("sup |t_k(a)| = {sup} exceeds 1/4")));
    }
    let mut prefix = 0.0;
    let mut r = 1;
    loop {
        prefix += a.value(r).powi(2);
        let tail = total - prefix;
        if tail + err <= 0.25 {
            let delta = 0.25 / (r as f64).sqrt();
            return Ok(Applicability::Applicable(LowerBoundReport {
                kind: LowerBoundKind::TailSplit { r, delta },
                value: 3.0 / 32.0,
            }));
        }
        if r >= r_max {
            return Ok(Applicability::not(format!(
                "no split: tail sum after r = {r} is {tail}, and r ≤ {r_max} is forced by sup {sup}"
            )));
        }
        if r >= SPLIT_SEARCH_LIMIT {
            return Ok(Applicability::not("split search limit reached"));
        }
        r += 1;
    }
}

/// Exact K_{1,2}(x, t) = inf{‖x′‖₁ + t‖x″‖₂ : x′ + x″ = x}, together with the
/// clipping level θ of the optimal split x″ = sign(x)·min(|x|, θ).
pub fn k_functional_split(x: &[f64], t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(DepthError::Domain(format!("t must be nonnegative, got {t}")));
    }
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    if a.is_empty() {
        return Ok((0.0, 0.0));
    }
    a.sort_by(|p, q| q.total_cmp(p));
    let d = a.len();
    // For θ in [a_{j+1}, a_j] exactly j entries are clipped:
    // f(θ) = P_j − jθ + t·√(jθ² + Q_j).
    let mut prefix = vec![0.0; d + 1];
    for j in 0..d {
        prefix[j + 1] = prefix[j] + a[j];
    }
    let mut suffix_sq = vec![0.0; d + 1];
    for j in (0..d).rev() {
        suffix_sq[j] = suffix_sq[j + 1] + a[j] * a[j];
    }
    let f = |j: usize, theta: f64| {
        let jf = j as f64;
        prefix[j] - jf * theta + t * (jf * theta * theta + suffix_sq[j]).sqrt()
    };
    let mut best = (f(0, a[0]), a[0]);
    for j in 1..=d {
        let hi = a[j - 1];
        let lo = if j < d { a[j] } else { 0.0 };
        for theta in [lo, hi] {
            let v = f(j, theta);
            if v < best.0 {
                best = (v, theta);
            }
        }
        let jf = j as f64;
        if t * t > jf {
            let theta = (suffix_sq[j] / (t * t - jf)).sqrt();
            if theta > lo && theta < hi {
                let v = f(j, theta);
                if v < best.0 {
                    best = (v, theta);
                }
            }
        }
    }
    Ok(best)
}

pub fn k_functional(x: &[f64], t: f64) -> Result<f64> {
    k_functional_split(x, t).map(|(v, _)| v)
}

/// J_{∞,2}(x, t) = max(‖x‖_∞, t‖x‖₂).
pub fn j_functional(x: &[f64], t: f64) -> f64 {
    let sup = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let l2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    sup.max(t * l2)
}

/// Largest support enumerated exactly by the brute-force depth search.
pub const BRUTE_FORCE_MAX_SUPPORT: usize = 12;

/// Minimum over a direction set of the exact probability
/// P(Σ_{k≤d} α_k ε_k ≥ Σ_{k≤d} α_k t_k(a)), by enumeration of the 2^d sign
/// patterns. Any direction gives an upper bound on the depth. The set holds
/// ±e_k, ±a restricted to d coordinates, and `random` Gaussian directions.
pub fn rademacher_depth_upper(a: &Point, d: usize, random: usize, seed: u64) -> Result<f64> {
    if d == 0 || d > BRUTE_FORCE_MAX_SUPPORT {
        return Err(DepthError::Domain(format!("support size {d} outside 1..={BRUTE_FORCE_MAX_SUPPORT}")));
    }
    let t = a.head(d);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[k] = s;
            dirs.push(e);
        }
    }
    if t.iter().any(|v| *v != 0.0) {
        dirs.push(t.clone());
        dirs.push(t.iter().map(|v| -v).collect());
    }
    for i in 0..random {
        let mut rng = cell_rng(seed, i as u64, 0);
        dirs.push((0..d).map(|_| crate::models::rng::std_normal(&mut rng)).collect());
    }
    let patterns = 1usize << d;
    let mut best: f64 = 1.0;
    for alpha in &dirs {
        let scale: f64 = alpha.iter().map(|v| v.abs()).sum();
        let threshold: f64 = alpha.iter().zip(&t).map(|(p, q)| p * q).sum::<f64>() - 1e-12 * scale;
        let hits = (0..patterns)
            .filter(|s| {
                let sum: f64 = (0..d).map(|k| if s >> k & 1 == 1 { alpha[k] } else { -alpha[k] }).sum();
                sum >= threshold
            })
            .count();
        best = best.min(hits as f64 / patterns as f64);
    }
    Ok(best)
}

/// c⁻¹ e^{−c t0²} when max(c‖τ(a)‖_∞, c‖τ(a)‖₂/t0) ≤ 1 under i.i.d. signs.
/// Flagged suspect when it exceeds 1/2 (no Rademacher point is deeper) or a
/// brute-force depth over the leading coordinates.
pub fn ms_lower_bound(a: &Point, c: f64, t0: f64) -> Result<Applicability> {
    if !(c > 0.0) || !(t0 > 0.0) {
        return Err(DepthError::Domain(format!("c and t0 must be positive, got c = {c}, t0 = {t0}")));
    }
    let model = SequenceModel::rademacher();
    let (abs_head, abs_tail) = model.ratio_terms(a, 1.0, Normalizer::Scale)?;
    let (sq_head, sq_tail) = model.ratio_terms(a, 2.0, Normalizer::Scale)?;
    let Some(sup) = sup_series(&abs_head, &abs_tail) else {
        return Ok(Applicability::not("opaque tail"));
    };
    let l2 = match sum_series(&sq_head, &sq_tail) {
        SeriesValue::Finite { value, abs_error } => (value, abs_error),
        _ => return Ok(Applicability::not("sum of squares is not finite")),
    };
    let level = (c * sup).max(c * l2.0.sqrt() / t0);
    // A condition met with equality is accepted up to the series' own
    // rounding error.
    let slack = c * ((l2.0 + l2.1).sqrt() - l2.0.sqrt()) / t0 + 4.0 * f64::EPSILON;
    if level > 1.0 + slack {
        return Ok(Applicability::not(format!("condition level {level} exceeds 1")));
    }
    let value = (-c * t0 * t0).exp() / c;
    let d = a
        .support_len()
        .unwrap_or(BRUTE_FORCE_MAX_SUPPORT)
        .clamp(1, BRUTE_FORCE_MAX_SUPPORT);
    let upper = rademacher_depth_upper(a, d, 64, 0x6d73)?;
    let suspect = value > 0.5 || value > upper;
    Ok(Applicability::Applicable(LowerBoundReport {
        kind: LowerBoundKind::Ms {
            c,
            t0,
            suspect,
            brute_force_upper: Some(upper),
        },
        value,
    }))
}

/// 2^{-d}, a lower bound on the depth of the projection onto the first d
/// coordinates when every |t_k(a)| ≤ 1 there.
pub fn projection_lower_bound(a: &Point, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(DepthError::Domain("d must be at least 1".into()));
    }
    if let Some(k) = (1..=d).find(|&k| a.value(k).abs() > 1.0) {
        return Err(DepthError::Domain(format!(
            "|t_{k}(a)| = {} exceeds 1: the projected depth is zero",
            a.value(k).abs()
        )));
    }
    Ok(0.5f64.powi(d as i32))
}

/// E[(a_n⁻¹ Σ_{k≤n} t_k²/σ_k² − 1)²] from analytic moments, with a_n = n in
/// the default form.
pub fn wlln_second_moment(model: &SequenceModel, n: usize) -> Result<f64> {
    wlln_second_moment_scaled(model, n, n as f64)
}

pub fn wlln_second_moment_scaled(model: &SequenceModel, n: usize, a_n: f64) -> Result<f64> {
    if n == 0 || !(a_n > 0.0) {
        return Err(DepthError::Domain("n and a_n must be positive".into()));
    }
    // Z_k = t_k²/σ_k² has E Z = 1 and E Z² = κ_k, so with Y = Σ Z_k:
    // E Y = n and E Y² = Σ κ_k + n(n − 1).
    let mut kappa = 0.0;
    for k in 1..=n {
        kappa += model.law(k)?.kurtosis()?;
    }
    let nf = n as f64;
    if a_n == nf {
        return Ok(kappa / (nf * nf) - 1.0 / nf);
    }
    Ok((kappa + nf * nf - nf) / (a_n * a_n) - 2.0 * nf / a_n + 1.0)
}
