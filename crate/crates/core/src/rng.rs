//! Counter-seeded random streams.
//!
//! Every probe draws from its own stream identified by `(seed, tag, index)`,
//! so work split across threads reproduces the sequential result exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{AffineSubspace, Vector};

/// Stream tags. Distinct tags keep unrelated probes decorrelated.
pub mod tag {
    pub const SAMPLE: u64 = 1;
    pub const PAIRS: u64 = 2;
    pub const HESSIAN: u64 = 3;
    pub const CONTINUITY: u64 = 4;
    pub const RAYS: u64 = 5;
    pub const LINES: u64 = 6;
    pub const ORACLE: u64 = 7;
    pub const PROBE: u64 = 8;
    pub const DOMAIN: u64 = 9;
    pub const SLICES: u64 = 10;
    pub const BODY: u64 = 11;
}

pub fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mixed = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(index);
    rng
}

/// Uniformly distributed unit vector in the direction space of `hull`.
/// Returns `None` for a zero-dimensional hull.
pub fn unit_direction<R: Rng>(rng: &mut R, hull: &AffineSubspace) -> Option<Vector> {
    if hull.dim() == 0 {
        return None;
    }
    loop {
        let coeffs: Vec<f64> = (0..hull.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let scaled: Vec<f64> = coeffs.iter().map(|c| c / norm).collect();
            return Some(hull.direction_from_coords(&scaled));
        }
    }
}
