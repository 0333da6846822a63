use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::geometry::Flat;
use crate::ring::RingContext;
use crate::scalar::Q;

/// Shapes of seeded test densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Values `a / D` with `D <= 8` and `0 <= a <= 2D`.
    UniformRational,
    /// A handful of nonzero points on a zero background.
    Sparse,
    /// Positive exactly on a translate of a random flat.
    FlatSupported,
    /// Indicator of one point: a ball of radius `1/N`.
    Ball,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [
        Distribution::UniformRational,
        Distribution::Sparse,
        Distribution::FlatSupported,
        Distribution::Ball,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Distribution::UniformRational => "uniform-rational",
            Distribution::Sparse => "sparse",
            Distribution::FlatSupported => "flat-supported",
            Distribution::Ball => "ball",
        }
    }

    /// Distribution used for trial `t` of a seeded corpus.
    pub fn for_trial(t: usize) -> Self {
        Self::ALL[t % Self::ALL.len()]
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown distribution `{s}`"))
    }
}

/// Seed of trial `t` in a corpus with base seed `seed` (splitmix64 finaliser).
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    let mut z = seed.wrapping_add((t as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn positive_rational(rng: &mut ChaCha8Rng) -> Q {
    let d = rng.gen_range(1..=8i128);
    Q::new(rng.gen_range(1..=2 * d), d)
}

fn random_point(ctx: &RingContext, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..ctx.dim()).map(|_| rng.gen_range(0..ctx.modulus())).collect()
}

/// A random element of `Gr((Z/NZ)^n, k)`, by rejection on the unit-minor condition.
pub fn random_flat(ctx: &RingContext, k: usize, rng: &mut ChaCha8Rng) -> Flat {
    loop {
        let rows = (0..k).map(|_| random_point(ctx, rng)).collect();
        if let Ok(flat) = Flat::new(ctx, rows) {
            return flat;
        }
    }
}

/// Deterministic nonnegative rational density.
pub fn random_density(ctx: &RingContext, seed: u64, dist: Distribution) -> Density<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::UniformRational => {
            let d = rng.gen_range(1..=8i128);
            Density::from_fn(ctx, |_| Q::new(rng.gen_range(0..=2 * d), d))
        }
        Distribution::Sparse => {
            let total = ctx.num_points();
            let count = rng.gen_range(1..=(total / 8).max(2));
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut rng);
            let mut f = Density::zeros(ctx);
            for &i in &idx[..count] {
                f.values_mut()[i] = positive_rational(&mut rng);
            }
            f
        }
        Distribution::FlatSupported => {
            let k = rng.gen_range(1..ctx.dim());
            let shift = random_point(ctx, &mut rng);
            let flat = random_flat(ctx, k, &mut rng).translate(ctx, &shift);
            let mut f = Density::zeros(ctx);
            for x in flat.points(ctx) {
                f.values_mut()[ctx.index(&x)] = positive_rational(&mut rng);
            }
            f
        }
        Distribution::Ball => {
            let x = random_point(ctx, &mut rng);
            Density::indicator(ctx, &[x])
        }
    }
}

/// Density `t` of the corpus with base seed `seed`.
pub fn corpus_density(ctx: &RingContext, seed: u64, t: usize) -> Density<Q> {
    random_density(ctx, trial_seed(seed, t), Distribution::for_trial(t))
}

/// Deterministic density with values in `{0, ..., max}`.
pub fn random_integer_density(ctx: &RingContext, seed: u64, max: u64) -> Density<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Density::from_fn(ctx, |_| Q::from_integer(rng.gen_range(0..=max) as i128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn seeded_densities_repeat() {
        let ctx = RingContext::plain(6, 3).unwrap();
        for dist in Distribution::ALL {
            assert_eq!(random_density(&ctx, 11, dist), random_density(&ctx, 11, dist));
        }
        assert_ne!(
            random_density(&ctx, 11, Distribution::UniformRational),
            random_density(&ctx, 12, Distribution::UniformRational)
        );
    }

    #[test]
    fn ball_is_one_point() {
        let ctx = RingContext::plain(5, 2).unwrap();
        let f = random_density(&ctx, 3, Distribution::Ball);
        assert_eq!(f.values().iter().filter(|v| v.is_one()).count(), 1);
        assert_eq!(f.values().iter().filter(|v| v.is_zero()).count(), 24);
    }

    #[test]
    fn flat_supported_support_is_a_flat_translate() {
        for seed in 0..20 {
            let ctx = RingContext::plain(4, 3).unwrap();
            let f = random_density(&ctx, seed, Distribution::FlatSupported);
            let support: Vec<Vec<u64>> = (0..ctx.num_points())
                .filter(|&i| !f.at(i).is_zero())
                .map(|i| ctx.coords(i))
                .collect();
            let base = &support[0];
            let gens: Vec<Vec<u64>> = support
                .iter()
                .map(|x| x.iter().zip(base).map(|(&a, &b)| (a + 4 - b) % 4).collect())
                .collect();
            // the differences form a subgroup of size 4^k
            let size = support.len();
            assert!(size == 4 || size == 16, "seed {seed}: size {size}");
            for g in &gens {
                for h in &gens {
                    let s: Vec<u64> = g.iter().zip(h).map(|(a, b)| (a + b) % 4).collect();
                    assert!(gens.contains(&s));
                }
            }
        }
    }

    #[test]
    fn values_are_nonnegative_and_bounded() {
        let ctx = RingContext::plain(3, 3).unwrap();
        for t in 0..40 {
            let f = corpus_density(&ctx, 5, t);
            assert!(f.is_nonnegative());
            assert!(f.max_value() <= Q::from_integer(2));
        }
    }
}
