//! Univariate densities with pointwise evaluation, used by the
//! Fisher-information and Hellinger-affinity computations.

use std::fmt;
use std::sync::Arc;

use crate::error::{DepthError, Result};
use crate::quadrature::Quadrature;
use crate::special::{logistic_cdf, logistic_pdf, normal_cdf, normal_pdf};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability density φ on an interval (possibly the whole line).
#[derive(Clone)]
pub struct Density {
    name: String,
    pdf: ScalarFn,
    dpdf: Option<ScalarFn>,
    cdf: Option<ScalarFn>,
    quantile: Option<ScalarFn>,
    support: (f64, f64),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("analytic_derivative", &self.dpdf.is_some())
            .finish()
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.support == other.support
    }
}

impl Density {
    pub fn new(
        name: impl Into<String>,
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Result<Self> {
        if !(support.0 < support.1) {
            return Err(DepthError::Domain(format!("empty support {support:?}")));
        }
        Ok(Self {
            name: name.into(),
            pdf: Arc::new(pdf),
            dpdf: None,
            cdf: None,
            quantile: None,
            support,
        })
    }

    pub fn with_derivative(mut self, dpdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dpdf = Some(Arc::new(dpdf));
        self
    }

    pub fn with_cdf(mut self, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cdf = Some(Arc::new(cdf));
        self
    }

    pub fn with_quantile(mut self, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.quantile = Some(Arc::new(q));
        self
    }

    pub fn standard_normal() -> Self {
        Self::new("standard_normal", normal_pdf, (f64::NEG_INFINITY, f64::INFINITY))
            .expect("valid support")
            .with_derivative(|x| -x * normal_pdf(x))
            .with_cdf(normal_cdf)
    }

    /// Standard logistic density e^{-x}/(1+e^{-x})².
    pub fn logistic() -> Self {
        Self::new("logistic", logistic_pdf, (f64::NEG_INFINITY, f64::INFINITY))
            .expect("valid support")
            .with_derivative(|x| {
                let f = logistic_pdf(x);
                // φ' = -φ·tanh(x/2)
                -f * (0.5 * x).tanh()
            })
            .with_cdf(logistic_cdf)
            .with_quantile(|u| (u / (1.0 - u)).ln())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dpdf.is_some()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.support.0 || x > self.support.1 {
            0.0
        } else {
            (self.pdf)(x)
        }
    }

    /// φ'(x), analytic when supplied, else a centered difference with step
    /// h = max(1e-6, 1e-6·|x|).
    pub fn dpdf(&self, x: f64) -> f64 {
        match &self.dpdf {
            Some(d) => d(x),
            None => {
                let h = (1e-6 * x.abs()).max(1e-6);
                ((self.pdf)(x + h) - (self.pdf)(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.support.0 {
            return 0.0;
        }
        if x >= self.support.1 {
            return 1.0;
        }
        match &self.cdf {
            Some(c) => c(x),
            None => Quadrature::with_tolerance(1e-12, 1e-10)
                .integrate(|t| (self.pdf)(t), self.support.0, x)
                .map(|r| r.value.clamp(0.0, 1.0))
                .unwrap_or(f64::NAN),
        }
    }

    /// Quantile function, analytic when supplied, else bisection on the cdf.
    pub fn quantile(&self, u: f64) -> f64 {
        if let Some(q) = &self.quantile {
            return q(u);
        }
        let (mut lo, mut hi) = self.support;
        if lo == f64::NEG_INFINITY {
            lo = -1.0;
            while self.cdf(lo) > u {
                lo *= 2.0;
            }
        }
        if hi == f64::INFINITY {
            hi = 1.0;
            while self.cdf(hi) < u {
                hi *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Checks φ ≥ 0 on a probe grid and ∫φ = 1 within 1e-8.
    pub fn validate(&self) -> Result<()> {
        for x in self.probes() {
            let v = self.pdf(x);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(DepthError::Domain(format!(
                    "density {} is invalid at x = {x}: {v}",
                    self.name
                )));
            }
        }
        let mass = Quadrature::with_tolerance(1e-11, 1e-12)
            .integrate(|t| self.pdf(t), self.support.0, self.support.1)?;
        if (mass.value - 1.0).abs() > 1e-8 {
            return Err(DepthError::Domain(format!(
                "density {} integrates to {} rather than 1",
                self.name, mass.value
            )));
        }
        Ok(())
    }

    /// First probe point in the interior of the support where φ = 0.
    pub fn find_zero(&self) -> Option<f64> {
        self.probes().into_iter().find(|&x| {
            x > self.support.0 && x < self.support.1 && self.pdf(x) <= 0.0
        })
    }

    /// φ(x) = φ(−x) on the probe grid, to relative precision 1e-10.
    pub fn is_symmetric(&self) -> bool {
        if self.support.0 != -self.support.1 {
            return false;
        }
        self.probes().into_iter().all(|x| {
            let (a, b) = (self.pdf(x), self.pdf(-x));
            (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
        })
    }

    fn probes(&self) -> Vec<f64> {
        let (lo, hi) = self.support;
        let lo = if lo.is_finite() { lo } else { -30.0 };
        let hi = if hi.is_finite() { hi } else { 30.0 };
        let n = 601;
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn builtins_validate() {
        Density::standard_normal().validate().unwrap();
        Density::logistic().validate().unwrap();
        assert!(Density::logistic().is_symmetric());
    }

    #[test]
    fn finite_difference_matches_analytic_derivative() {
        let n = Density::standard_normal();
        let fd = Density::new("fd_normal", normal_pdf, n.support()).unwrap();
        for x in [-3.0, -0.7, 0.0, 1.3, 4.0] {
            assert_abs_diff_eq!(fd.dpdf(x), n.dpdf(x), epsilon = 1e-9);
        }
    }

    #[test]
    fn numeric_cdf_and_quantile() {
        let fd = Density::new("plain_normal", normal_pdf, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_abs_diff_eq!(fd.cdf(1.0), normal_cdf(1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(fd.quantile(normal_cdf(0.8)), 0.8, epsilon = 1e-7);
    }

    #[test]
    fn unnormalized_density_is_rejected() {
        let bad = Density::new("twice", |x| 2.0 * normal_pdf(x), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert!(bad.validate().is_err());
        let skew = Density::new("half", |x| if x > 0.0 { 2.0 * normal_pdf(x) } else { 0.0 }, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert!(skew.find_zero().is_some());
        assert!(!skew.is_symmetric());
    }
}
