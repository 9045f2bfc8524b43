//! Deterministic sample points for exact verification.

use num::bigint::BigInt;
use num::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::CirclePoint;
use crate::rational::Q;

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplePlan {
    pub farey: usize,
    pub random: usize,
    pub seed: u64,
}

impl SamplePlan {
    /// Half Farey points, half seeded random points.
    pub fn split(total: usize, seed: u64) -> SamplePlan {
        SamplePlan {
            farey: total / 2,
            random: total - total / 2,
            seed,
        }
    }

    pub fn total(&self) -> usize {
        self.farey + self.random
    }

    pub fn points(&self) -> Vec<CirclePoint> {
        let mut out = farey_points(self.farey);
        out.extend(random_points(self.random, self.seed));
        out
    }
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::split(DEFAULT_SAMPLES, DEFAULT_SEED)
    }
}

/// The first `n` reduced fractions in `[0, 1)` ordered by denominator, then numerator.
pub fn farey_points(n: usize) -> Vec<CirclePoint> {
    let mut out = Vec::with_capacity(n);
    let mut d: u64 = 1;
    while out.len() < n {
        for p in 0..d {
            if out.len() == n {
                break;
            }
            if p.gcd(&d) == 1 {
                out.push(CirclePoint::new(Q::new(BigInt::from(p), BigInt::from(d))));
            }
        }
        d += 1;
    }
    out
}

/// `n` rationals with random denominators up to `2^20`.
pub fn random_points(n: usize, seed: u64) -> Vec<CirclePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let d: u64 = rng.gen_range(2..=1 << 20);
            let p: u64 = rng.gen_range(0..d);
            CirclePoint::new(Q::new(BigInt::from(p), BigInt::from(d)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn farey_order() {
        let v = farey_points(6);
        let want: Vec<_> = [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)]
            .iter()
            .map(|&(a, b)| CirclePoint::new(q(a, b)))
            .collect();
        assert_eq!(v, want);
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random_points(10, 7), random_points(10, 7));
        assert_ne!(random_points(10, 7), random_points(10, 8));
        assert_eq!(SamplePlan::split(512, 1).points().len(), 512);
    }
}
