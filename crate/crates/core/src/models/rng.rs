//! Counter-based random streams.
//!
//! Every cell `(j, k)` of a sample draws from its own ChaCha8 substream:
//! the stream id is the row and the word position is fixed by the column,
//! so a value never depends on the order in which cells are generated.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved per cell. Four ChaCha blocks cover every sampler here.
const WORDS_PER_CELL: u128 = 64;

/// Independent generator for cell `(row, col)` under `seed`.
pub fn cell_rng(seed: u64, row: u64, col: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng.set_word_pos(col as u128 * WORDS_PER_CELL);
    rng
}

/// Generator for a whole row, read sequentially.
pub fn row_rng(seed: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng
}

/// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
pub fn open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box–Muller (one of the pair is discarded).
pub fn std_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u1 = open01(rng);
    let u2 = open01(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
