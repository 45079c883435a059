//! Independent coordinate-sequence models and their samples.

use std::io::Write;

use rayon::prelude::*;

use super::law::{CoordinateLaw, Family};
use super::point::{Point, Tail};
use super::rng::cell_rng;
use crate::error::{DepthError, Result};
use crate::series::TermTail;

/// How the tail rule scales coordinate k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleRule {
    Constant(f64),
    /// scale_k = coef · k^gamma.
    PowerLaw { coef: f64, gamma: f64 },
}

impl ScaleRule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            ScaleRule::Constant(c) => c,
            ScaleRule::PowerLaw { coef, gamma } => coef * (k as f64).powf(gamma),
        }
    }

    fn coef_gamma(&self) -> (f64, f64) {
        match *self {
            ScaleRule::Constant(c) => (c, 0.0),
            ScaleRule::PowerLaw { coef, gamma } => (coef, gamma),
        }
    }
}

/// Generates the law of every coordinate past the explicit head.
#[derive(Debug, Clone, PartialEq)]
pub struct LawRule {
    pub family: Family,
    pub scale: ScaleRule,
}

/// Which normalizer divides t_k in a weighted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// Standard deviation when finite, else the scale parameter.
    SeriesScale,
    /// The raw scale parameter (c_k of a stable law).
    Scale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceModel {
    head: Vec<CoordinateLaw>,
    tail: Option<LawRule>,
}

impl SequenceModel {
    pub fn new(head: Vec<CoordinateLaw>, tail: Option<LawRule>) -> Result<Self> {
        if head.is_empty() && tail.is_none() {
            return Err(DepthError::Domain("model needs at least one coordinate law".into()));
        }
        if let Some(rule) = &tail {
            rule.family.validate()?;
            let (coef, _) = rule.scale.coef_gamma();
            if !(coef > 0.0) || !coef.is_finite() {
                return Err(DepthError::Domain(format!("tail scale must be positive, got {coef}")));
            }
        }
        Ok(Self { head, tail })
    }

    /// Every coordinate drawn from `family` with scale rule `scale`.
    pub fn iid(family: Family, scale: ScaleRule) -> Result<Self> {
        Self::new(Vec::new(), Some(LawRule { family, scale }))
    }

    pub fn gaussian_unit() -> Self {
        Self::iid(Family::Gaussian, ScaleRule::Constant(1.0)).expect("valid model")
    }

    pub fn rademacher() -> Self {
        Self::iid(Family::Rademacher, ScaleRule::Constant(1.0)).expect("valid model")
    }

    pub fn head(&self) -> &[CoordinateLaw] {
        &self.head
    }

    pub fn tail_rule(&self) -> Option<&LawRule> {
        self.tail.as_ref()
    }

    /// Number of generable coordinates, `None` when unbounded.
    pub fn width(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.head.len()),
        }
    }

    /// Law of coordinate k (1-based).
    pub fn law(&self, k: usize) -> Result<CoordinateLaw> {
        if k == 0 {
            return Err(DepthError::LawUnavailable(0));
        }
        if k <= self.head.len() {
            return Ok(self.head[k - 1].clone());
        }
        match &self.tail {
            Some(rule) => CoordinateLaw::new(rule.family.clone(), rule.scale.at(k)),
            None => Err(DepthError::LawUnavailable(k)),
        }
    }

    /// All coordinate families, when they agree.
    pub fn common_family(&self) -> Option<Family> {
        let mut fams = self
            .head
            .iter()
            .map(|l| l.family().clone())
            .chain(self.tail.iter().map(|r| r.family.clone()));
        let first = fams.next()?;
        fams.all(|f| f == first).then_some(first)
    }

    pub fn is_symmetric(&self) -> bool {
        let tail_sym = self.tail.as_ref().is_none_or(|r| {
            CoordinateLaw::new(r.family.clone(), 1.0)
                .map(|l| l.is_symmetric())
                .unwrap_or(false)
        });
        tail_sym && self.head.iter().all(|l| l.is_symmetric())
    }

    /// Terms |t_k(a)/s_k|^q split into an explicit head and an analytic tail,
    /// where s_k is the chosen normalizer.
    pub fn ratio_terms(&self, a: &Point, q: f64, norm: Normalizer) -> Result<(Vec<f64>, TermTail)> {
        let normalizer = |law: &CoordinateLaw| match norm {
            Normalizer::SeriesScale => law.series_scale(),
            Normalizer::Scale => law.scale(),
        };
        let m = a.coords().len();
        let n0 = m.max(self.head.len());
        let Some(rule) = &self.tail else {
            let k0 = self.head.len();
            let beyond = (k0 + 1..=m).find(|&k| a.value(k) != 0.0);
            if let Some(k) = beyond {
                return Err(DepthError::LawUnavailable(k));
            }
            if !a.tail_is_zero() {
                return Err(DepthError::LawUnavailable(m.max(k0) + 1));
            }
            let head = (1..=k0)
                .map(|k| Ok((a.value(k) / normalizer(&self.head[k - 1])).abs().powf(q)))
                .collect::<Result<Vec<f64>>>()?;
            return Ok((head, TermTail::Zero));
        };
        let head = (1..=n0)
            .map(|k| Ok((a.value(k) / normalizer(&self.law(k)?)).abs().powf(q)))
            .collect::<Result<Vec<f64>>>()?;
        let base = normalizer(&CoordinateLaw::new(rule.family.clone(), 1.0)?);
        let (coef, gamma) = rule.scale.coef_gamma();
        let s = base * coef;
        let tail = match a.tail() {
            Tail::Zero => TermTail::Zero,
            Tail::PowerLaw { coef: c, exponent } => TermTail::Modulated {
                weights: vec![(c / s).abs().powf(q)],
                exponent: q * (exponent - gamma),
            },
            Tail::Periodic(p) => TermTail::Modulated {
                weights: p.iter().map(|x| (x / s).abs().powf(q)).collect(),
                exponent: -q * gamma,
            },
            Tail::Opaque(f) => {
                let f = f.clone();
                let rule = rule.scale;
                TermTail::Opaque(std::sync::Arc::new(move |k| {
                    (f(k) / (base * rule.at(k))).abs().powf(q)
                }))
            }
        };
        Ok((head, tail))
    }

    /// n × K sample with cell (j, k) drawn from its own counter-based stream.
    pub fn sample(&self, n: usize, k: usize, seed: u64) -> Result<Sample> {
        if n == 0 || k == 0 {
            return Err(DepthError::Domain("sample needs n ≥ 1 and K ≥ 1".into()));
        }
        let laws = (1..=k).map(|i| self.law(i)).collect::<Result<Vec<_>>>()?;
        let mut data = vec![0.0; n * k];
        data.par_chunks_mut(k).enumerate().for_each(|(j, row)| {
            for (i, cell) in row.iter_mut().enumerate() {
                let mut rng = cell_rng(seed, j as u64, i as u64);
                *cell = laws[i].sample(&mut rng);
            }
        });
        Ok(Sample { n, k, data, seed })
    }
}

/// Realized coordinates t_k(X_j), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    n: usize,
    k: usize,
    data: Vec<f64>,
    seed: u64,
}

impl Sample {
    pub fn from_rows(rows: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, |r| r.len());
        if n == 0 || k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(DepthError::Domain("sample rows must be nonempty and equal length".into()));
        }
        Ok(Self {
            n,
            k,
            data: rows.into_iter().flatten().collect(),
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Row j (0-based) as (t_1(X_j), …, t_K(X_j)).
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.k..(j + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.k)
    }

    /// Column k (1-based).
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k - 1]).collect()
    }

    /// CSV with header "j,k,value"; both indices 1-based.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| DepthError::Domain(format!("csv: {e}"));
        w.write_record(["j", "k", "value"]).map_err(io)?;
        for (j, row) in self.rows().enumerate() {
            for (k, v) in row.iter().enumerate() {
                w.write_record([(j + 1).to_string(), (k + 1).to_string(), format!("{v:e}")])
                    .map_err(io)?;
            }
        }
        w.flush().map_err(|e| DepthError::Domain(format!("csv: {e}")))?;
        Ok(())
    }
}
