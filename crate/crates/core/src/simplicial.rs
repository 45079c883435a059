//! Simplicial depth: open-simplex membership, Monte Carlo depth in R^d, the
//! U-statistic estimator on coordinate blocks, and the block-projection
//! depth whose empirical version collapses to zero.

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{DepthError, Result};
use crate::export::csv_string;
use crate::models::rng::row_rng;
use crate::models::{CoordinateLaw, Family, Point, Sample, SequenceModel};
use crate::special::binomial;

/// Relative pivot size below which a vertex set counts as degenerate.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of enumerated subsets.
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;

/// θ_k: x ↦ (x_{(k−1)d+1}, …, x_{kd}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockProjection {
    d: usize,
    k: usize,
}

impl BlockProjection {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(DepthError::Domain(format!("block needs d ≥ 1 and k ≥ 1, got d={d}, k={k}")));
        }
        Ok(Self { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Last coordinate index the block reads.
    pub fn end(&self) -> usize {
        self.k * self.d
    }

    pub fn project<'r>(&self, row: &'r [f64]) -> Result<&'r [f64]> {
        if self.end() > row.len() {
            return Err(DepthError::DirectionOutOfRange {
                index: self.end(),
                width: row.len(),
            });
        }
        Ok(&row[self.end() - self.d..self.end()])
    }

    pub fn project_point(&self, a: &Point) -> Vec<f64> {
        (self.end() - self.d + 1..=self.end()).map(|i| a.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HullTest {
    Inside,
    Outside,
    Degenerate,
}

/// Solves x = Σ w_i v_i, Σ w_i = 1 by elimination with partial pivoting and
/// reports whether every weight is strictly positive.
pub fn open_simplex_test(x: &[f64], vertices: &[&[f64]]) -> HullTest {
    let d = x.len();
    let m = d + 1;
    assert_eq!(vertices.len(), m, "need d + 1 vertices");
    let w = m + 1;
    let mut a = vec![0.0; m * w];
    for i in 0..d {
        for (j, v) in vertices.iter().enumerate() {
            a[i * w + j] = v[i];
        }
        a[i * w + m] = x[i];
    }
    for j in 0..m {
        a[d * w + j] = 1.0;
    }
    a[d * w + m] = 1.0;
    let scale = (0..m)
        .flat_map(|i| a[i * w..i * w + m].iter().copied())
        .fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = PIVOT_TOLERANCE * scale;
    for c in 0..m {
        let p = (c..m)
            .max_by(|&r, &s| a[r * w + c].abs().total_cmp(&a[s * w + c].abs()))
            .expect("nonempty range");
        if a[p * w + c].abs() < tol || a[p * w + c] == 0.0 {
            return HullTest::Degenerate;
        }
        if p != c {
            for j in 0..w {
                a.swap(p * w + j, c * w + j);
            }
        }
        for r in c + 1..m {
            let f = a[r * w + c] / a[c * w + c];
            if f != 0.0 {
                for j in c..w {
                    a[r * w + j] -= f * a[c * w + j];
                }
            }
        }
    }
    let mut weights = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|j| a[r * w + j] * weights[j]).sum();
        weights[r] = (a[r * w + m] - s) / a[r * w + r];
    }
    if weights.iter().all(|v| *v > 0.0) {
        HullTest::Inside
    } else {
        HullTest::Outside
    }
}

/// x lies in the open convex hull of the d + 1 vertices; degenerate vertex
/// sets are never inside.
pub fn point_in_open_simplex(x: &[f64], vertices: &[&[f64]]) -> bool {
    open_simplex_test(x, vertices) == HullTest::Inside
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplicialEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub draws: usize,
    pub degenerate: u64,
}

impl SimplicialEstimate {
    fn from_hits(hits: u64, draws: usize, degenerate: u64) -> Self {
        let p = hits as f64 / draws as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / draws as f64).sqrt(),
            draws,
            degenerate,
        }
    }
}

const MC_CHUNK: usize = 8192;

/// P(x ∈ open hull of Y_1, …, Y_{d+1}) for i.i.d. Y_i from `sampler`; chunk c
/// of the draws reads stream c of `seed`.
pub fn simplicial_depth_mc<S>(x: &[f64], sampler: S, draws: usize, seed: u64) -> Result<SimplicialEstimate>
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    if draws == 0 {
        return Err(DepthError::Domain("need at least one draw".into()));
    }
    let d = x.len();
    let chunks = draws.div_ceil(MC_CHUNK);
    let (hits, degenerate) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = row_rng(seed, c as u64);
            let len = MC_CHUNK.min(draws - c * MC_CHUNK);
            let (mut hits, mut degenerate) = (0u64, 0u64);
            for _ in 0..len {
                let ys: Vec<Vec<f64>> = (0..=d).map(|_| sampler(&mut rng)).collect();
                let refs: Vec<&[f64]> = ys.iter().map(|y| y.as_slice()).collect();
                match open_simplex_test(x, &refs) {
                    HullTest::Inside => hits += 1,
                    HullTest::Degenerate => degenerate += 1,
                    HullTest::Outside => {}
                }
            }
            (hits, degenerate)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimplicialEstimate::from_hits(hits, draws, degenerate))
}

/// λ(a) for block `block` of a model: the simplicial depth of θ_k(a) under
/// the law of θ_k(X).
pub fn block_depth_mc(a: &Point, model: &SequenceModel, block: BlockProjection, draws: usize, seed: u64) -> Result<SimplicialEstimate> {
    let laws = (block.end() - block.d() + 1..=block.end())
        .map(|i| model.law(i))
        .collect::<Result<Vec<CoordinateLaw>>>()?;
    let x = block.project_point(a);
    simplicial_depth_mc(&x, |rng| laws.iter().map(|l| l.sample(rng)).collect(), draws, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UStatistic {
    /// Z_{n,k}: subsets whose open hull contains θ_k(a).
    pub z: u64,
    /// N_{n,d} = C(n, d + 1).
    pub subsets: u128,
    pub ratio: f64,
    /// √((d + 1)² ζ̂₁ / n), from per-row hit counts.
    pub stderr: f64,
    pub degenerate: u64,
}

fn block_rows(sample: &Sample, block: BlockProjection) -> Result<Vec<&[f64]>> {
    sample.rows().map(|r| block.project(r)).collect()
}

fn check_sample(sample: &Sample, d: usize) -> Result<u128> {
    let n = sample.n();
    if n < d + 1 {
        return Err(DepthError::InsufficientSample(format!("need n ≥ d + 1 = {}, got {n}", d + 1)));
    }
    binomial(n as u64, d as u64 + 1).ok_or(DepthError::BudgetExceeded {
        subsets: u128::MAX,
        budget: u128::MAX,
    })
}

/// Advances `idx` to the next increasing tuple with entries below `n`.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let m = idx.len();
    for i in (0..m).rev() {
        if idx[i] < n - m + i {
            idx[i] += 1;
            for j in i + 1..m {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact Z_{n,k} over all (d + 1)-subsets of rows, refusing more than
/// `budget` subsets.
pub fn u_statistic_depth(a: &Point, sample: &Sample, block: BlockProjection, budget: u128) -> Result<UStatistic> {
    let d = block.d();
    let subsets = check_sample(sample, d)?;
    if subsets > budget {
        return Err(DepthError::BudgetExceeded { subsets, budget });
    }
    let rows = block_rows(sample, block)?;
    let x = block.project_point(a);
    let n = sample.n();
    // Partition by the first index; each part enumerates the d-subsets of
    // the rows after it.
    let (row_hits, z, degenerate) = (0..=n - d - 1)
        .into_par_iter()
        .map(|first| {
            let mut row_hits = vec![0u64; n];
            let (mut z, mut degenerate) = (0u64, 0u64);
            let mut rest: Vec<usize> = (first + 1..first + 1 + d).collect();
            let mut verts: Vec<&[f64]> = Vec::with_capacity(d + 1);
            loop {
                verts.clear();
                verts.push(rows[first]);
                verts.extend(rest.iter().map(|&j| rows[j]));
                match open_simplex_test(&x, &verts) {
                    HullTest::Inside => {
                        z += 1;
                        row_hits[first] += 1;
                        for &j in &rest {
                            row_hits[j] += 1;
                        }
                    }
                    HullTest::Degenerate => degenerate += 1,
                    HullTest::Outside => {}
                }
                if !next_combination_from(&mut rest, first + 1, n) {
                    break;
                }
            }
            (row_hits, z, degenerate)
        })
        .reduce(
            || (vec![0u64; n], 0, 0),
            |mut a, b| {
                a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
                (a.0, a.1 + b.1, a.2 + b.2)
            },
        );
    let ratio = z as f64 / subsets as f64;
    Ok(UStatistic {
        z,
        subsets,
        ratio,
        stderr: u_stat_stderr(&row_hits, n, d),
        degenerate,
    })
}

fn next_combination_from(idx: &mut [usize], offset: usize, n: usize) -> bool {
    idx.iter_mut().for_each(|i| *i -= offset);
    let more = next_combination(idx, n - offset);
    idx.iter_mut().for_each(|i| *i += offset);
    more
}

fn u_stat_stderr(row_hits: &[u64], n: usize, d: usize) -> f64 {
    let per_row = binomial(n as u64 - 1, d as u64).expect("checked above") as f64;
    if n < 2 || per_row == 0.0 {
        return 0.0;
    }
    let h: Vec<f64> = row_hits.iter().map(|&c| c as f64 / per_row).collect();
    let mean = h.iter().sum::<f64>() / n as f64;
    let zeta1 = h.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (((d + 1) as f64).powi(2) * zeta1 / n as f64).sqrt()
}

/// Z_{n,k}/N_{n,d} from `draws` uniformly drawn (d + 1)-subsets.
pub fn u_statistic_depth_subsampled(a: &Point, sample: &Sample, block: BlockProjection, draws: usize, seed: u64) -> Result<SimplicialEstimate> {
    let d = block.d();
    check_sample(sample, d)?;
    if draws == 0 {
        return Err(DepthError::Domain("need at least one draw".into()));
    }
    let rows = block_rows(sample, block)?;
    let x = block.project_point(a);
    let n = sample.n();
    let chunks = draws.div_ceil(MC_CHUNK);
    let (hits, degenerate) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = row_rng(seed, c as u64);
            let len = MC_CHUNK.min(draws - c * MC_CHUNK);
            let (mut hits, mut degenerate) = (0u64, 0u64);
            for _ in 0..len {
                let verts: Vec<&[f64]> = index::sample(&mut rng, n, d + 1).into_iter().map(|j| rows[j]).collect();
                match open_simplex_test(&x, &verts) {
                    HullTest::Inside => hits += 1,
                    HullTest::Degenerate => degenerate += 1,
                    HullTest::Outside => {}
                }
            }
            (hits, degenerate)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimplicialEstimate::from_hits(hits, draws, degenerate))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicialRecord {
    pub n: usize,
    pub d: usize,
    /// N_{n,d}.
    pub subsets: u128,
    /// Z_{n,k} for k = 1, …, k_max.
    pub block_counts: Vec<u64>,
    /// min_k Z_{n,k}/N_{n,d}.
    pub d_theta_n: f64,
    pub degenerate: u64,
}

/// The empirical block-projection depth min_{k ≤ k_max} Z_{n,k}/N_{n,d}.
pub fn mosler_polyakova_empirical(a: &Point, sample: &Sample, d: usize, k_max: usize, budget: u128) -> Result<SimplicialRecord> {
    if k_max == 0 {
        return Err(DepthError::Domain("k_max must be ≥ 1".into()));
    }
    let width = sample.width();
    if k_max * d > width {
        return Err(DepthError::DirectionOutOfRange { index: k_max * d, width });
    }
    let subsets = check_sample(sample, d)?;
    let total = subsets.saturating_mul(k_max as u128);
    if total > budget {
        return Err(DepthError::BudgetExceeded { subsets: total, budget });
    }
    let mut block_counts = Vec::with_capacity(k_max);
    let mut degenerate = 0;
    for k in 1..=k_max {
        let u = u_statistic_depth(a, sample, BlockProjection::new(d, k)?, budget)?;
        block_counts.push(u.z);
        degenerate += u.degenerate;
    }
    let min = *block_counts.iter().min().expect("k_max ≥ 1");
    Ok(SimplicialRecord {
        n: sample.n(),
        d,
        subsets,
        block_counts,
        d_theta_n: min as f64 / subsets as f64,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicialSeedRecord {
    pub seed: u64,
    pub record: SimplicialRecord,
    pub zero_hit: bool,
    /// |D_{Θ,n} − λ̂|.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Homogeneity {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicialSummary {
    pub seeds: usize,
    pub k_max: usize,
    pub fraction_zero: f64,
    pub fraction_zero_stderr: f64,
    pub lambda_hat: SimplicialEstimate,
    /// 1 − (1 − p₀)^{k_max}, where p₀ bounds the chance that one block sees
    /// every sample point on one side of a coordinate of θ(a).
    pub floor: f64,
    pub mean_gap: f64,
    /// Chi-square test that the zero-hit rate is the same in every block.
    pub block_homogeneity: Homogeneity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicialExperiment {
    pub records: Vec<SimplicialSeedRecord>,
    pub summary: SimplicialSummary,
}

impl SimplicialExperiment {
    /// CSV with header "seed,k,Z,N,ratio", one line per seed and block.
    pub fn to_csv(&self) -> Result<String> {
        csv_string(
            &["seed", "k", "Z", "N", "ratio"],
            self.records.iter().flat_map(|r| {
                let n = r.record.subsets;
                r.record.block_counts.iter().enumerate().map(move |(k, z)| {
                    [
                        r.seed.to_string(),
                        (k + 1).to_string(),
                        z.to_string(),
                        n.to_string(),
                        (*z as f64 / n as f64).to_string(),
                    ]
                })
            }),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimplicialConfig {
    pub n: usize,
    pub d: usize,
    pub k_max: usize,
    pub seeds: usize,
    pub master_seed: u64,
    pub mc_draws: usize,
    pub budget: u128,
}

/// Stream key for the λ̂ estimate, kept apart from the per-seed samples.
const LAMBDA_STREAM: u64 = 0x6c61_6d62_6461;

fn homogeneity(zero_counts: &[usize], seeds: usize) -> Homogeneity {
    let k = zero_counts.len();
    let total: usize = zero_counts.iter().sum();
    let p = total as f64 / (k * seeds) as f64;
    let dof = k.saturating_sub(1);
    if p == 0.0 || p == 1.0 || dof == 0 {
        return Homogeneity {
            statistic: 0.0,
            dof,
            p_value: 1.0,
        };
    }
    let e = seeds as f64 * p;
    let statistic: f64 = zero_counts
        .iter()
        .map(|&o| (o as f64 - e).powi(2) / (e * (1.0 - p)))
        .sum();
    let p_value = ChiSquared::new(dof as f64).map_or(f64::NAN, |c| c.sf(statistic));
    Homogeneity { statistic, dof, p_value }
}

/// Per seed `master + i`, D_{Θ,n}(a) from n draws of an i.i.d. continuous
/// model at a point whose blocks θ_1(a), …, θ_{k_max}(a) coincide, against
/// the Monte Carlo λ(a).
pub fn simplicial_failure_experiment(model: &SequenceModel, a: &Point, cfg: SimplicialConfig) -> Result<SimplicialExperiment> {
    let SimplicialConfig { n, d, k_max, seeds, master_seed, mc_draws, budget } = cfg;
    if seeds == 0 || k_max == 0 || d == 0 {
        return Err(DepthError::Domain("seeds, k_max and d must be ≥ 1".into()));
    }
    let width = k_max * d;
    let law = model.law(1)?;
    if matches!(law.family(), Family::Rademacher) {
        return Err(DepthError::Domain("a continuous marginal is required".into()));
    }
    for i in 2..=width {
        if model.law(i)? != law {
            return Err(DepthError::HeterogeneousModel("coordinates must be identically distributed".into()));
        }
    }
    let first = BlockProjection::new(d, 1)?.project_point(a);
    for k in 2..=k_max {
        if BlockProjection::new(d, k)?.project_point(a) != first {
            return Err(DepthError::Domain(format!("block {k} of the point differs from block 1")));
        }
    }
    let lambda_hat = block_depth_mc(a, model, BlockProjection::new(d, 1)?, mc_draws, master_seed ^ LAMBDA_STREAM)?;
    let records = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seed = master_seed.wrapping_add(i);
            let sample = model.sample(n, width, seed)?;
            let record = mosler_polyakova_empirical(a, &sample, d, k_max, budget)?;
            Ok(SimplicialSeedRecord {
                seed,
                zero_hit: record.block_counts.contains(&0),
                gap: (record.d_theta_n - lambda_hat.estimate).abs(),
                record,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let zeros = records.iter().filter(|r| r.zero_hit).count();
    let fraction_zero = zeros as f64 / seeds as f64;
    let p0 = first
        .iter()
        .map(|&x| {
            let f = law.cdf_left(x);
            let g = 1.0 - law.cdf(x);
            f.powi(n as i32) + g.powi(n as i32)
        })
        .fold(0.0, f64::max);
    let zero_counts: Vec<usize> = (0..k_max)
        .map(|k| records.iter().filter(|r| r.record.block_counts[k] == 0).count())
        .collect();
    let summary = SimplicialSummary {
        seeds,
        k_max,
        fraction_zero,
        fraction_zero_stderr: (fraction_zero * (1.0 - fraction_zero) / seeds as f64).sqrt(),
        lambda_hat,
        floor: 1.0 - (1.0 - p0.min(1.0)).powi(k_max as i32),
        mean_gap: records.iter().map(|r| r.gap).sum::<f64>() / seeds as f64,
        block_homogeneity: homogeneity(&zero_counts, seeds),
    };
    Ok(SimplicialExperiment { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::rng::open01;
    use crate::models::ScaleRule;
    use proptest::prelude::*;

    fn uniform_model() -> SequenceModel {
        SequenceModel::iid(Family::Uniform { lo: 0.0, hi: 1.0 }, ScaleRule::Constant(1.0)).unwrap()
    }

    #[test]
    fn simplex_examples() {
        let (o, e1, e2) = ([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        let v: [&[f64]; 3] = [&o, &e1, &e2];
        assert_eq!(open_simplex_test(&[0.25, 0.25], &v), HullTest::Inside);
        assert_eq!(open_simplex_test(&[0.5, 0.0], &v), HullTest::Outside);
        assert_eq!(open_simplex_test(&[0.6, 0.6], &v), HullTest::Outside);
        let collinear: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]];
        assert_eq!(open_simplex_test(&[1.0, 1.0], &collinear), HullTest::Degenerate);
        assert!(!point_in_open_simplex(&[1.0, 1.0], &collinear));
        let interval: [&[f64]; 2] = [&[3.0], &[-1.0]];
        assert!(point_in_open_simplex(&[0.0], &interval));
        assert!(!point_in_open_simplex(&[3.0], &interval));
    }

    #[test]
    fn median_depth_on_the_line() {
        let law = CoordinateLaw::gaussian(1.0).unwrap();
        let est = simplicial_depth_mc(&[0.0], |r| vec![law.sample(r)], 200_000, 3).unwrap();
        assert!((est.estimate - 0.5).abs() < 3.0 * est.stderr, "{est:?}");
        let far = simplicial_depth_mc(&[50.0], |r| vec![law.sample(r)], 10_000, 3).unwrap();
        assert_eq!(far.estimate, 0.0);
    }

    #[test]
    fn disc_center_depth() {
        let disc = |r: &mut ChaCha8Rng| {
            let rad = open01(r).sqrt();
            let ang = std::f64::consts::TAU * open01(r);
            vec![rad * ang.cos(), rad * ang.sin()]
        };
        let est = simplicial_depth_mc(&[0.0, 0.0], disc, 1_000_000, 9).unwrap();
        assert!((est.estimate - 0.25).abs() < 3.0 * est.stderr, "{est:?}");
        assert_eq!(est.degenerate, 0);
    }

    #[test]
    fn single_subset() {
        let s = Sample::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 0).unwrap();
        let a = Point::new(vec![0.2, 0.2]).unwrap();
        let u = u_statistic_depth(&a, &s, BlockProjection::new(2, 1).unwrap(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!((u.z, u.subsets), (1, 1));
        let small = Sample::from_rows(vec![vec![0.0, 0.0]; 2], 0).unwrap();
        assert!(matches!(
            u_statistic_depth(&a, &small, BlockProjection::new(2, 1).unwrap(), DEFAULT_SUBSET_BUDGET),
            Err(DepthError::InsufficientSample(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let s = uniform_model().sample(30, 2, 1).unwrap();
        let a = Point::new(vec![0.5, 0.5]).unwrap();
        let block = BlockProjection::new(2, 1).unwrap();
        assert!(matches!(
            u_statistic_depth(&a, &s, block, 1000),
            Err(DepthError::BudgetExceeded { subsets: 4060, budget: 1000 })
        ));
        let exact = u_statistic_depth(&a, &s, block, DEFAULT_SUBSET_BUDGET).unwrap();
        let sub = u_statistic_depth_subsampled(&a, &s, block, 200_000, 4).unwrap();
        assert!((sub.estimate - exact.ratio).abs() < 4.0 * sub.stderr);
    }

    #[test]
    fn combination_walk_covers_all_subsets() {
        let mut idx = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut idx, 7) {
            count += 1;
        }
        assert_eq!(count, 35);
    }

    #[test]
    fn u_statistic_tracks_block_depth() {
        let m = uniform_model();
        let a = Point::periodic(vec![0.5, 0.5]).unwrap();
        let block = BlockProjection::new(2, 1).unwrap();
        let lambda = block_depth_mc(&a, &m, block, 100_000, 77).unwrap();
        let s = m.sample(20, 2, 12).unwrap();
        let u = u_statistic_depth(&a, &s, block, DEFAULT_SUBSET_BUDGET).unwrap();
        let se = u.stderr.hypot(lambda.stderr);
        assert!((u.ratio - lambda.estimate).abs() < 3.0 * se, "{} vs {} ± {se}", u.ratio, lambda.estimate);
    }

    #[test]
    fn reduces_to_single_block() {
        let m = uniform_model();
        let a = Point::periodic(vec![0.4, 0.6]).unwrap();
        let s = m.sample(9, 2, 5).unwrap();
        let rec = mosler_polyakova_empirical(&a, &s, 2, 1, DEFAULT_SUBSET_BUDGET).unwrap();
        let u = u_statistic_depth(&a, &s, BlockProjection::new(2, 1).unwrap(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(rec.block_counts, vec![u.z]);
        assert_eq!(rec.d_theta_n, u.ratio);
        assert!(matches!(
            mosler_polyakova_empirical(&a, &s, 2, 2, DEFAULT_SUBSET_BUDGET),
            Err(DepthError::DirectionOutOfRange { index: 4, width: 2 })
        ));
    }

    fn cfg(n: usize, k_max: usize, seeds: usize) -> SimplicialConfig {
        SimplicialConfig {
            n,
            d: 2,
            k_max,
            seeds,
            master_seed: 21,
            mc_draws: 20_000,
            budget: DEFAULT_SUBSET_BUDGET,
        }
    }

    #[test]
    fn small_samples_hit_zero() {
        let a = Point::periodic(vec![0.5]).unwrap();
        let r = simplicial_failure_experiment(&uniform_model(), &a, cfg(3, 100, 200)).unwrap();
        assert!((r.summary.floor - (1.0 - 0.75f64.powi(100))).abs() < 1e-15);
        assert!(r.summary.fraction_zero >= r.summary.floor - 3.0 * r.summary.fraction_zero_stderr.max(1e-3));
        assert!(r.summary.lambda_hat.estimate > 0.2);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("seed,k,Z,N,ratio\n21,1,"));
        assert_eq!(csv.lines().count(), 1 + 200 * 100);
    }

    #[test]
    fn block_counts_are_homogeneous() {
        let a = Point::periodic(vec![0.5]).unwrap();
        let r = simplicial_failure_experiment(&uniform_model(), &a, cfg(5, 40, 300)).unwrap();
        let h = r.summary.block_homogeneity;
        assert_eq!(h.dof, 39);
        assert!(h.p_value > 1e-3, "{h:?}");
    }

    #[test]
    fn outside_support_gives_zero_gap() {
        let a = Point::periodic(vec![2.0]).unwrap();
        let r = simplicial_failure_experiment(&uniform_model(), &a, cfg(6, 3, 10)).unwrap();
        assert_eq!(r.summary.lambda_hat.estimate, 0.0);
        assert_eq!(r.summary.fraction_zero, 1.0);
        assert_eq!(r.summary.mean_gap, 0.0);
    }

    #[test]
    fn preconditions() {
        let a = Point::periodic(vec![0.0]).unwrap();
        assert!(simplicial_failure_experiment(&SequenceModel::rademacher(), &a, cfg(4, 2, 2)).is_err());
        let aperiodic = Point::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(simplicial_failure_experiment(&uniform_model(), &aperiodic, cfg(4, 2, 2)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn line_count_is_below_times_above(seed in 0u64..10_000, n in 2usize..25, x in -1.0f64..1.0) {
            let s = SequenceModel::gaussian_unit().sample(n, 1, seed).unwrap();
            let col = s.column(1);
            let below = col.iter().filter(|v| **v < x).count() as u64;
            let above = col.iter().filter(|v| **v > x).count() as u64;
            let a = Point::new(vec![x]).unwrap();
            let u = u_statistic_depth(&a, &s, BlockProjection::new(1, 1).unwrap(), DEFAULT_SUBSET_BUDGET).unwrap();
            prop_assert_eq!(u.z, below * above);
        }

        #[test]
        fn permuting_rows_changes_nothing(seed in 0u64..10_000, shift in 1usize..9) {
            let s = uniform_model().sample(9, 2, seed).unwrap();
            let mut rows: Vec<Vec<f64>> = s.rows().map(|r| r.to_vec()).collect();
            rows.rotate_left(shift);
            rows.swap(0, 4);
            let p = Sample::from_rows(rows, seed).unwrap();
            let a = Point::new(vec![0.45, 0.55]).unwrap();
            let block = BlockProjection::new(2, 1).unwrap();
            let x = u_statistic_depth(&a, &s, block, DEFAULT_SUBSET_BUDGET).unwrap();
            let y = u_statistic_depth(&a, &p, block, DEFAULT_SUBSET_BUDGET).unwrap();
            prop_assert_eq!(x.z, y.z);
        }

        #[test]
        fn affine_maps_preserve_counts(seed in 0u64..10_000, m in proptest::array::uniform4(-2.0f64..2.0), b in proptest::array::uniform2(-5.0f64..5.0)) {
            let det = m[0] * m[3] - m[1] * m[2];
            prop_assume!(det.abs() > 0.1);
            let map = |v: &[f64]| vec![m[0] * v[0] + m[1] * v[1] + b[0], m[2] * v[0] + m[3] * v[1] + b[1]];
            let s = SequenceModel::gaussian_unit().sample(10, 2, seed).unwrap();
            let a = Point::new(vec![0.3, -0.2]).unwrap();
            let block = BlockProjection::new(2, 1).unwrap();
            let mapped = Sample::from_rows(s.rows().map(map).collect(), seed).unwrap();
            let ma = Point::new(map(&a.head(2))).unwrap();
            let x = u_statistic_depth(&a, &s, block, DEFAULT_SUBSET_BUDGET).unwrap();
            let y = u_statistic_depth(&ma, &mapped, block, DEFAULT_SUBSET_BUDGET).unwrap();
            prop_assert_eq!(x.z, y.z);
        }
    }
}
