//! Empirical half-space depth over finite direction families, and the
//! experiments showing that it collapses to zero in infinite dimension.

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{gaussian_sequence_depth, rademacher_classify, stable_depth, stable_sf, DepthValue, Positivity};
use crate::bounds::markov_witness;
use crate::error::{DepthError, Result};
use crate::export::csv_string;
use crate::models::rng::{row_rng, std_normal};
use crate::models::{Direction, Family, Normalizer, Point, Sample, SequenceModel};
use crate::series::TermTail;

/// A finite family of directions standing in for the infimum over 𝒯.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DirectionFamily {
    /// t_1, …, t_K.
    Coordinates { k: usize },
    /// `count` directions, each with `support_size` distinct indices drawn
    /// from 1..=max_index and standard normal coefficients.
    RandomSparse {
        count: usize,
        support_size: usize,
        max_index: usize,
        seed: u64,
    },
    /// Markov witnesses α^(m) for the listed depths m.
    MarkovWitnesses { depths: Vec<usize> },
    Explicit { directions: Vec<Direction> },
}

impl DirectionFamily {
    pub fn name(&self) -> String {
        match self {
            Self::Coordinates { k } => format!("coordinates(K={k})"),
            Self::RandomSparse { count, support_size, max_index, seed } => {
                format!("random-sparse(count={count}, support={support_size}, max={max_index}, seed={seed})")
            }
            Self::MarkovWitnesses { depths } => format!("markov-witnesses({} depths)", depths.len()),
            Self::Explicit { directions } => format!("explicit({} directions)", directions.len()),
        }
    }

    /// The family as a list; witnesses depend on the point and model.
    pub fn resolve(&self, a: &Point, model: &SequenceModel) -> Result<Vec<Direction>> {
        let dirs = match self {
            Self::Coordinates { k } => (1..=*k).map(Direction::coordinate).collect::<Result<Vec<_>>>()?,
            Self::RandomSparse { count, support_size, max_index, seed } => {
                if *support_size == 0 || support_size > max_index {
                    return Err(DepthError::Domain(format!(
                        "support size {support_size} must lie in 1..={max_index}"
                    )));
                }
                (0..*count as u64)
                    .map(|i| {
                        let mut rng = row_rng(*seed, i);
                        let idx = index::sample(&mut rng, *max_index, *support_size);
                        Direction::new(idx.into_iter().map(|k| (k + 1, std_normal(&mut rng))))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Self::MarkovWitnesses { depths } => {
                let mut out = Vec::with_capacity(depths.len());
                for &m in depths {
                    match markov_witness(a, model, m)? {
                        Some((dir, _)) => out.push(dir),
                        None => return Err(DepthError::NoWitness(format!("no witness at depth {m}"))),
                    }
                }
                out
            }
            Self::Explicit { directions } => directions.clone(),
        };
        if dirs.is_empty() {
            return Err(DepthError::Domain("direction family is empty".into()));
        }
        Ok(dirs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDepth {
    /// hits / n.
    pub value: f64,
    pub hits: usize,
    pub n: usize,
    /// First minimizer in family order.
    pub argmin: Direction,
    pub argmin_index: usize,
}

/// min over the family of n⁻¹ #{j : t(X_j) ≥ t(a)}; ties count.
pub fn empirical_half_space_depth(a: &Point, sample: &Sample, family: &[Direction]) -> Result<EmpiricalDepth> {
    let width = sample.width();
    if family.is_empty() {
        return Err(DepthError::Domain("direction family is empty".into()));
    }
    if let Some(d) = family.iter().find(|d| d.max_index() > width) {
        return Err(DepthError::DirectionOutOfRange {
            index: d.max_index(),
            width,
        });
    }
    let hits: Vec<usize> = family
        .par_iter()
        .map(|dir| {
            // apply_point and apply_row_unchecked sum in the same order, so a
            // row equal to a ties exactly.
            let threshold = dir.apply_point(a);
            sample
                .rows()
                .filter(|row| dir.apply_row_unchecked(row) >= threshold)
                .count()
        })
        .collect();
    let (argmin_index, &min) = hits
        .iter()
        .enumerate()
        .min_by_key(|(i, h)| (**h, *i))
        .expect("nonempty family");
    Ok(EmpiricalDepth {
        value: min as f64 / sample.n() as f64,
        hits: min,
        n: sample.n(),
        argmin: family[argmin_index].clone(),
        argmin_index,
    })
}

/// Analytic depth of `a` when a closed form or zero certificate exists.
pub fn analytic_depth(a: &Point, model: &SequenceModel) -> Option<DepthValue> {
    if let Ok(r) = gaussian_sequence_depth(a, model) {
        return Some(r.value);
    }
    if let Ok(r) = stable_depth(a, model) {
        return Some(r.value);
    }
    if model.common_family() == Some(Family::Rademacher) && model.law(1).is_ok_and(|l| l.scale() == 1.0) {
        return match rademacher_classify(a).ok()?.verdict {
            Positivity::Zero => Some(DepthValue::ZeroCertified),
            _ => None,
        };
    }
    None
}

/// P(t_α(X) ≥ t_α(a)) in closed form for Gaussian and stable models.
pub fn direction_probability(dir: &Direction, a: &Point, model: &SequenceModel) -> Result<f64> {
    let laws = dir
        .support()
        .iter()
        .map(|&k| model.law(k))
        .collect::<Result<Vec<_>>>()?;
    let p = laws[0]
        .family()
        .stability_index()
        .ok_or_else(|| DepthError::HeterogeneousModel(format!("{} is not stable", laws[0].family().name())))?;
    if laws.iter().any(|l| l.family().stability_index() != Some(p)) {
        return Err(DepthError::HeterogeneousModel("stability indices are mixed".into()));
    }
    let scale = dir
        .coeffs()
        .iter()
        .zip(&laws)
        .map(|(c, l)| (c * l.scale()).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    Ok(stable_sf(p, dir.apply_point(a) / scale).0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub empirical_depth: f64,
    pub argmin_direction: Direction,
    pub zero_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub seeds: usize,
    pub fraction_zero: f64,
    pub fraction_zero_stderr: f64,
    pub mean_depth: f64,
    /// min_k P(t_k(X) < t_k(a)) over the sampled coordinates; the floors
    /// are only reported for coordinate families.
    pub delta_hat: Option<f64>,
    /// 1 − (1 − δ̂ⁿ)^K.
    pub floor: Option<f64>,
    /// 1 − Π_k (1 − P(t_k(X) < t_k(a))ⁿ), the exact per-seed zero probability.
    pub floor_exact: Option<f64>,
    pub true_depth_reference: Option<DepthValue>,
    /// Whether t_k(a)/σ_k → 0; `None` for opaque tails.
    pub vanishing_ratio: Option<bool>,
    /// True depth positive while most seeds see zero.
    pub consistency_failure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub records: Vec<SeedRecord>,
    pub summary: ExperimentSummary,
}

impl ExperimentResult {
    /// CSV with header "seed,n,K,empirical_depth,zero_hit".
    pub fn to_csv(&self) -> Result<String> {
        csv_string(
            &["seed", "n", "K", "empirical_depth", "zero_hit"],
            self.records.iter().map(|r| {
                [
                    r.seed.to_string(),
                    r.n.to_string(),
                    r.k.to_string(),
                    r.empirical_depth.to_string(),
                    r.zero_hit.to_string(),
                ]
            }),
        )
    }
}

/// Default coordinate count for zero-depth experiments.
pub fn default_width(n: usize) -> usize {
    50 * n
}

fn vanishing_ratio(a: &Point, model: &SequenceModel) -> Option<bool> {
    let (_, tail) = model.ratio_terms(a, 1.0, Normalizer::SeriesScale).ok()?;
    match tail {
        TermTail::Zero => Some(true),
        TermTail::Modulated { weights, exponent } => Some(exponent < 0.0 || weights.iter().all(|w| *w == 0.0)),
        TermTail::Opaque(_) => None,
    }
}

/// Per seed `master + i`, the empirical depth of `a` over t_1, …, t_K from n
/// draws; K defaults to 50·n.
pub fn zero_depth_experiment(
    model: &SequenceModel,
    a: &Point,
    n: usize,
    k: Option<usize>,
    seeds: usize,
    master_seed: u64,
) -> Result<ExperimentResult> {
    let k = k.unwrap_or_else(|| default_width(n));
    empirical_depth_experiment(model, a, n, &DirectionFamily::Coordinates { k }, seeds, master_seed)
}

/// Per seed `master + i`, the empirical depth of `a` over `family` from n
/// draws of width equal to the largest index the family reads.
pub fn empirical_depth_experiment(
    model: &SequenceModel,
    a: &Point,
    n: usize,
    family_spec: &DirectionFamily,
    seeds: usize,
    master_seed: u64,
) -> Result<ExperimentResult> {
    if seeds == 0 || n == 0 {
        return Err(DepthError::Domain("need n ≥ 1 and at least one seed".into()));
    }
    let family = family_spec.resolve(a, model)?;
    let k = family.iter().map(Direction::max_index).max().expect("nonempty family");
    let records = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seed = master_seed.wrapping_add(i);
            let sample = model.sample(n, k, seed)?;
            let d = empirical_half_space_depth(a, &sample, &family)?;
            Ok(SeedRecord {
                seed,
                n,
                k,
                empirical_depth: d.value,
                argmin_direction: d.argmin,
                zero_hit: d.hits == 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (delta_hat, floor, floor_exact) = match family_spec {
        DirectionFamily::Coordinates { .. } => {
            let below = (1..=k)
                .map(|i| Ok(model.law(i)?.cdf_left(a.value(i))))
                .collect::<Result<Vec<f64>>>()?;
            let delta_hat = below.iter().copied().fold(1.0, f64::min);
            let floor = 1.0 - (1.0 - delta_hat.powi(n as i32)).powi(k as i32);
            let exact = 1.0 - below.iter().map(|p| 1.0 - p.powi(n as i32)).product::<f64>();
            (Some(delta_hat), Some(floor), Some(exact))
        }
        _ => (None, None, None),
    };
    let zeros = records.iter().filter(|r| r.zero_hit).count();
    let fraction_zero = zeros as f64 / seeds as f64;
    let true_depth_reference = analytic_depth(a, model);
    let consistency_failure = true_depth_reference.is_some_and(|d| d.is_positive() && d.value().unwrap_or(0.0) > 0.0)
        && fraction_zero >= 0.5;
    let summary = ExperimentSummary {
        seeds,
        fraction_zero,
        fraction_zero_stderr: (fraction_zero * (1.0 - fraction_zero) / seeds as f64).sqrt(),
        mean_depth: records.iter().map(|r| r.empirical_depth).sum::<f64>() / seeds as f64,
        delta_hat,
        floor,
        floor_exact,
        true_depth_reference,
        vanishing_ratio: vanishing_ratio(a, model),
        consistency_failure,
    };
    Ok(ExperimentResult { records, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapReference {
    /// Depth over the whole linear span, from the analytic module.
    Span,
    /// Minimum of closed-form half-space probabilities over the family.
    Family,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub mean_depth: f64,
    pub stderr: f64,
    pub true_depth: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTable {
    pub family: String,
    pub width: usize,
    pub reference: GapReference,
    pub rows: Vec<GapRow>,
}

impl GapTable {
    /// CSV with header "n,mean_depth,stderr,true_depth,gap"; unknown values
    /// are empty fields.
    pub fn to_csv(&self) -> Result<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        csv_string(
            &["n", "mean_depth", "stderr", "true_depth", "gap"],
            self.rows.iter().map(|r| {
                [
                    r.n.to_string(),
                    r.mean_depth.to_string(),
                    r.stderr.to_string(),
                    opt(r.true_depth),
                    opt(r.gap),
                ]
            }),
        )
    }
}

/// Mean empirical depth against the true depth for each n in `n_grid`.
/// Explicit families are compared with their own infimum; other families
/// with the depth over the whole span.
pub fn consistency_gap(
    a: &Point,
    model: &SequenceModel,
    family: &DirectionFamily,
    n_grid: &[usize],
    seeds: usize,
    master_seed: u64,
) -> Result<GapTable> {
    if seeds == 0 {
        return Err(DepthError::Domain("need at least one seed".into()));
    }
    let dirs = family.resolve(a, model)?;
    let width = dirs.iter().map(Direction::max_index).max().expect("nonempty family");
    let reference = match family {
        DirectionFamily::Explicit { .. } => GapReference::Family,
        _ => GapReference::Span,
    };
    let true_depth = match reference {
        GapReference::Span => analytic_depth(a, model).and_then(|d| d.value()),
        GapReference::Family => dirs
            .iter()
            .map(|d| direction_probability(d, a, model))
            .collect::<Result<Vec<_>>>()
            .ok()
            .map(|ps| ps.into_iter().fold(1.0, f64::min)),
    };
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let depths = (0..seeds as u64)
            .into_par_iter()
            .map(|i| {
                let sample = model.sample(n, width, master_seed.wrapping_add(i))?;
                Ok(empirical_half_space_depth(a, &sample, &dirs)?.value)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = depths.iter().sum::<f64>() / seeds as f64;
        let var = depths.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (seeds.max(2) - 1) as f64;
        rows.push(GapRow {
            n,
            mean_depth: mean,
            stderr: (var / seeds as f64).sqrt(),
            true_depth,
            gap: true_depth.map(|t| (mean - t).abs()),
        });
    }
    Ok(GapTable {
        family: family.name(),
        width,
        reference,
        rows,
    })
}
