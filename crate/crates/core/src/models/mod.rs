//! Coordinate-sequence probability models, candidate points, directions and
//! deterministic samplers.

pub mod density;
pub mod law;
pub mod model;
pub mod point;
pub mod rng;

pub use density::Density;
pub use law::{stable_cdf, CoordinateLaw, Family, Moments};
pub use model::{LawRule, Normalizer, Sample, ScaleRule, SequenceModel};
pub use point::{Direction, Point, Tail};
