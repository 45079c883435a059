//! One-dimensional coordinate laws: X = scale · Y with Y drawn from a base
//! family.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::density::Density;
use super::rng::{open01, row_rng, std_normal};
use crate::error::{DepthError, Result};
use crate::quadrature::Quadrature;
use crate::special::{cauchy_cdf, normal_cdf};

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gaussian,
    /// Symmetric p-stable. At p = 2 the base variable is N(0,1); at p = 1 it
    /// is standard Cauchy; otherwise its characteristic function is
    /// exp(−|θ|^p).
    SymmetricStable { p: f64 },
    Rademacher,
    Uniform { lo: f64, hi: f64 },
    Custom(Density),
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Gaussian => "gaussian".into(),
            Family::SymmetricStable { p } => format!("stable(p={p})"),
            Family::Rademacher => "rademacher".into(),
            Family::Uniform { lo, hi } => format!("uniform({lo},{hi})"),
            Family::Custom(d) => format!("custom({})", d.name()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Family::SymmetricStable { p } if !(*p > 0.0 && *p <= 2.0) => Err(DepthError::Domain(
                format!("stability index must lie in (0, 2], got {p}"),
            )),
            Family::Uniform { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => Err(
                DepthError::Domain(format!("uniform requires finite lo < hi, got ({lo}, {hi})")),
            ),
            _ => Ok(()),
        }
    }

    /// The stability index when the family is stable; Gaussian counts as 2.
    pub fn stability_index(&self) -> Option<f64> {
        match self {
            Family::Gaussian => Some(2.0),
            Family::SymmetricStable { p } => Some(*p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateLaw {
    family: Family,
    scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub second: f64,
    pub fourth: f64,
}

impl CoordinateLaw {
    pub fn new(family: Family, scale: f64) -> Result<Self> {
        family.validate()?;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(DepthError::Domain(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { family, scale })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian, sigma)
    }

    pub fn stable(p: f64, c: f64) -> Result<Self> {
        Self::new(Family::SymmetricStable { p }, c)
    }

    pub fn rademacher() -> Self {
        Self {
            family: Family::Rademacher,
            scale: 1.0,
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Family::Uniform { lo, hi }, 1.0)
    }

    pub fn custom(density: Density, lambda: f64) -> Result<Self> {
        Self::new(Family::Custom(density), lambda)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            Family::Uniform { lo, hi } => *lo == -*hi,
            Family::Custom(d) => d.is_symmetric(),
            _ => true,
        }
    }

    /// E X² and E X⁴ of the base variable, when finite.
    fn base_moments(&self) -> Result<Moments> {
        match &self.family {
            Family::Gaussian => Ok(Moments { second: 1.0, fourth: 3.0 }),
            Family::SymmetricStable { p } if *p == 2.0 => Ok(Moments { second: 1.0, fourth: 3.0 }),
            Family::SymmetricStable { p } => Err(DepthError::MomentUnavailable(format!(
                "stable law with p = {p} has infinite variance"
            ))),
            Family::Rademacher => Ok(Moments { second: 1.0, fourth: 1.0 }),
            Family::Uniform { lo, hi } => {
                let w = hi - lo;
                Ok(Moments {
                    second: (hi.powi(3) - lo.powi(3)) / (3.0 * w),
                    fourth: (hi.powi(5) - lo.powi(5)) / (5.0 * w),
                })
            }
            Family::Custom(d) => {
                let q = Quadrature::with_tolerance(1e-12, 1e-10);
                let (lo, hi) = d.support();
                let m = |power: i32| {
                    q.integrate(|x| x.powi(power) * d.pdf(x), lo, hi)
                        .map_err(|_| {
                            DepthError::MomentUnavailable(format!(
                                "moment {power} of {} did not converge",
                                d.name()
                            ))
                        })
                        .map(|r| r.value)
                };
                Ok(Moments {
                    second: m(2)?,
                    fourth: m(4)?,
                })
            }
        }
    }

    pub fn moments(&self) -> Result<Moments> {
        let b = self.base_moments()?;
        let s2 = self.scale * self.scale;
        Ok(Moments {
            second: b.second * s2,
            fourth: b.fourth * s2 * s2,
        })
    }

    pub fn mean(&self) -> f64 {
        match &self.family {
            Family::Uniform { lo, hi } => 0.5 * (lo + hi) * self.scale,
            Family::Custom(d) if !d.is_symmetric() => {
                let (lo, hi) = d.support();
                Quadrature::default()
                    .integrate(|x| x * d.pdf(x), lo, hi)
                    .map(|r| r.value * self.scale)
                    .unwrap_or(f64::NAN)
            }
            _ => 0.0,
        }
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean();
        Ok(self.moments()?.second - m * m)
    }

    /// The normalizer σ_k used in weighted series: the standard deviation
    /// when the variance is finite, otherwise the scale parameter.
    pub fn series_scale(&self) -> f64 {
        match self.variance() {
            Ok(v) => v.sqrt(),
            Err(_) => self.scale,
        }
    }

    /// E X⁴ / (E X²)², the kurtosis constant of a mean-zero law.
    pub fn kurtosis(&self) -> Result<f64> {
        let b = self.base_moments()?;
        Ok(b.fourth / (b.second * b.second))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let y = x / self.scale;
        match &self.family {
            Family::Gaussian => normal_cdf(y),
            Family::SymmetricStable { p } => stable_cdf(*p, y).0,
            Family::Rademacher => {
                if y < -1.0 {
                    0.0
                } else if y < 1.0 {
                    0.5
                } else {
                    1.0
                }
            }
            Family::Uniform { lo, hi } => ((y - lo) / (hi - lo)).clamp(0.0, 1.0),
            Family::Custom(d) => d.cdf(y),
        }
    }

    /// Left limit F(x⁻).
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.family {
            Family::Rademacher => {
                let y = x / self.scale;
                if y <= -1.0 {
                    0.0
                } else if y <= 1.0 {
                    0.5
                } else {
                    1.0
                }
            }
            _ => self.cdf(x),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let y = match &self.family {
            Family::Gaussian => std_normal(rng),
            Family::SymmetricStable { p } => stable_draw(*p, rng),
            Family::Rademacher => {
                if rng.next_u64() >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::Uniform { lo, hi } => lo + (hi - lo) * open01(rng),
            Family::Custom(d) => d.quantile(open01(rng)),
        };
        self.scale * y
    }
}

/// Draw of the base stable variable; Box–Muller at p = 2, inverse cdf at
/// p = 1, Chambers–Mallows–Stuck otherwise.
pub fn stable_draw<R: RngCore + ?Sized>(p: f64, rng: &mut R) -> f64 {
    if p == 2.0 {
        return std_normal(rng);
    }
    if p == 1.0 {
        return (PI * (open01(rng) - 0.5)).tan();
    }
    let v = PI * (open01(rng) - 0.5);
    let w = -open01(rng).ln();
    let lead = (p * v).sin() / v.cos().powf(1.0 / p);
    let inner = ((v - p * v).cos() / w).powf((1.0 - p) / p);
    lead * inner
}

/// Draws backing the Monte Carlo distribution function for general p.
pub const STABLE_TABLE_DRAWS: usize = 1_000_000;
const STABLE_TABLE_SEED: u64 = 0x5ab1e;

type Table = Arc<Vec<f64>>;

fn stable_table(p: f64) -> Table {
    static CACHE: OnceLock<Mutex<HashMap<u64, Table>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("stable cache").get(&p.to_bits()) {
        return t.clone();
    }
    let chunk = 4096;
    let mut draws: Vec<f64> = (0..STABLE_TABLE_DRAWS.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = row_rng(STABLE_TABLE_SEED ^ p.to_bits(), c as u64);
            let len = chunk.min(STABLE_TABLE_DRAWS - c * chunk);
            (0..len).map(move |_| stable_draw(p, &mut rng)).collect::<Vec<_>>()
        })
        .collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    let t = Arc::new(draws);
    cache
        .lock()
        .expect("stable cache")
        .entry(p.to_bits())
        .or_insert(t)
        .clone()
}

/// P(S ≤ x) for the base stable variable with its standard error (zero for
/// the closed forms at p ∈ {1, 2}).
pub fn stable_cdf(p: f64, x: f64) -> (f64, f64) {
    if p == 2.0 {
        return (normal_cdf(x), 0.0);
    }
    if p == 1.0 {
        return (cauchy_cdf(x), 0.0);
    }
    if x == f64::INFINITY {
        return (1.0, 0.0);
    }
    let t = stable_table(p);
    let count = t.partition_point(|v| *v <= x);
    let n = t.len() as f64;
    let f = count as f64 / n;
    (f, (f * (1.0 - f) / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::rng::cell_rng;
    use approx::assert_abs_diff_eq;

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            d = d.max((cdf(x) - i as f64 / n).abs());
            d = d.max(((i + 1) as f64 / n - cdf(x)).abs());
            d = d.max((cdf_left(x) - i as f64 / n).abs());
        }
        d
    }

    fn draws(law: &CoordinateLaw, n: usize, seed: u64) -> Vec<f64> {
        (0..n).map(|j| law.sample(&mut cell_rng(seed, j as u64, 0))).collect()
    }

    #[test]
    fn marginals_pass_kolmogorov_smirnov() {
        let laws = vec![
            CoordinateLaw::gaussian(2.0).unwrap(),
            CoordinateLaw::stable(1.0, 0.5).unwrap(),
            CoordinateLaw::stable(2.0, 1.0).unwrap(),
            CoordinateLaw::uniform(-1.0, 3.0).unwrap(),
            CoordinateLaw::custom(Density::logistic(), 1.5).unwrap(),
        ];
        for law in laws {
            let d = ks_statistic(draws(&law, 10_000, 11), |x| law.cdf(x), |x| law.cdf_left(x));
            assert!(d < 0.02, "{:?}: D = {d}", law.family());
        }
        // Atoms: the empirical cdf must sit between F(x⁻) and F(x).
        let r = CoordinateLaw::rademacher();
        let xs = draws(&r, 10_000, 3);
        let plus = xs.iter().filter(|x| **x == 1.0).count() as f64 / 1e4;
        assert!(xs.iter().all(|x| x.abs() == 1.0));
        assert!((plus - 0.5).abs() < 0.02);
    }

    #[test]
    fn cms_matches_closed_forms_at_known_indices() {
        // CMS at p = 1 is exactly tan(V); near p = 2 the draw tends to N(0, 2).
        let mut rng = cell_rng(5, 0, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| stable_draw(1.999_999, &mut rng)).collect();
        let d = ks_statistic(xs, |x| normal_cdf(x / 2f64.sqrt()), |x| normal_cdf(x / 2f64.sqrt()));
        assert!(d < 0.02, "D = {d}");
    }

    #[test]
    fn general_stable_table() {
        let (f0, se) = stable_cdf(1.5, 0.0);
        assert_abs_diff_eq!(f0, 0.5, epsilon = 4.0 * se.max(5e-4));
        let (lo, _) = stable_cdf(1.5, -1.0);
        let (hi, _) = stable_cdf(1.5, 1.0);
        assert_abs_diff_eq!(lo, 1.0 - hi, epsilon = 3e-3);
    }

    #[test]
    fn moments_and_kurtosis() {
        let u = CoordinateLaw::uniform(-1.0, 1.0).unwrap();
        assert_abs_diff_eq!(u.moments().unwrap().second, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.kurtosis().unwrap(), 9.0 / 5.0, epsilon = 1e-12);
        assert_eq!(CoordinateLaw::gaussian(2.0).unwrap().kurtosis().unwrap(), 3.0);
        assert_eq!(CoordinateLaw::rademacher().kurtosis().unwrap(), 1.0);
        assert!(CoordinateLaw::stable(1.5, 1.0).unwrap().moments().is_err());
        let l = CoordinateLaw::custom(Density::logistic(), 1.0).unwrap();
        assert_abs_diff_eq!(l.moments().unwrap().second, PI * PI / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(CoordinateLaw::stable(0.7, 3.0).unwrap().series_scale(), 3.0);
    }

    #[test]
    fn invalid_laws_are_rejected() {
        assert!(CoordinateLaw::gaussian(0.0).is_err());
        assert!(CoordinateLaw::stable(2.5, 1.0).is_err());
        assert!(CoordinateLaw::stable(0.0, 1.0).is_err());
        assert!(CoordinateLaw::uniform(1.0, 1.0).is_err());
    }
}
