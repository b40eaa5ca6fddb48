//! Exact edge costs with a seeded tie-breaking perturbation.
//!
//! A cost packs the integer weight into the high 64 bits and a random
//! noise term into the low 64 bits. Noise values are drawn without
//! replacement from `[0, NOISE_RANGE)`, so sums over any desk-scale edge
//! set never carry into the weight half: comparing costs compares weights
//! first and breaks every tie by the noise sum.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type Weight = u64;
pub type Cost = u128;

pub const NOISE_RANGE: u64 = 1 << 20;
const SHIFT: u32 = 64;

pub fn pack(weight: Weight, noise: u64) -> Cost {
    ((weight as u128) << SHIFT) | noise as u128
}

/// Drops the perturbation term of a (possibly summed) cost.
pub fn base(cost: Cost) -> u128 {
    cost >> SHIFT
}

pub fn noise_of(cost: Cost) -> u64 {
    cost as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub seed: u64,
    noise: Vec<u64>,
}

impl Perturbation {
    /// Noise for `edge_count` root edges, deterministic in `seed`.
    pub fn new(edge_count: usize, seed: u64) -> Self {
        assert!(
            (edge_count as u64) <= NOISE_RANGE,
            "too many edges for the noise range"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = sample(&mut rng, NOISE_RANGE as usize, edge_count)
            .into_iter()
            .map(|x| x as u64)
            .collect();
        Perturbation { seed, noise }
    }

    /// No perturbation at all; costs equal weights.
    pub fn zero(edge_count: usize) -> Self {
        Perturbation {
            seed: 0,
            noise: vec![0; edge_count],
        }
    }

    pub fn noise(&self, root_edge: usize) -> u64 {
        self.noise[root_edge]
    }

    pub fn len(&self) -> usize {
        self.noise.len()
    }

    pub fn is_empty(&self) -> bool {
        self.noise.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_distinct_and_replayable() {
        let a = Perturbation::new(500, 7);
        let b = Perturbation::new(500, 7);
        assert_eq!(a, b);
        let mut v: Vec<u64> = (0..500).map(|i| a.noise(i)).collect();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), 500);
        assert!(v.iter().all(|&x| x < NOISE_RANGE));
    }

    #[test]
    fn packing_orders_by_weight_first() {
        assert!(pack(3, NOISE_RANGE - 1) < pack(4, 0));
        let sum: Cost = (0..1000).map(|_| pack(1, NOISE_RANGE - 1)).sum();
        assert_eq!(base(sum), 1000);
    }
}
