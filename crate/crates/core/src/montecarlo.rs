//! Deterministic Monte Carlo estimates of half-space probabilities, used to
//! validate closed forms and certified bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{DepthError, Result};
use crate::models::rng::cell_rng;
use crate::models::{Direction, Point, SequenceModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub draws: usize,
}

impl McEstimate {
    pub fn from_hits(hits: usize, draws: usize) -> Self {
        let p = hits as f64 / draws as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / draws as f64).sqrt(),
            draws,
        }
    }
}

/// P(t_α(X) ≥ t_α(a)) by direct simulation; draw j of coordinate k uses the
/// cell stream (seed, j, k).
pub fn halfspace_probability(
    model: &SequenceModel,
    a: &Point,
    dir: &Direction,
    draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    if draws == 0 {
        return Err(DepthError::Domain("draws must be positive".into()));
    }
    let laws = dir
        .support()
        .iter()
        .map(|&k| model.law(k))
        .collect::<Result<Vec<_>>>()?;
    let threshold = dir.apply_point(a);
    let hits: usize = (0..draws)
        .into_par_iter()
        .filter(|&j| {
            let s: f64 = dir
                .iter()
                .zip(&laws)
                .map(|((k, c), law)| c * law.sample(&mut cell_rng(seed, j as u64, k as u64 - 1)))
                .sum();
            s >= threshold
        })
        .count();
    Ok(McEstimate::from_hits(hits, draws))
}
