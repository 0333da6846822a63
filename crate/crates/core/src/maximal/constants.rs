//! Explicit constants of the maximal bounds. `log` is natural, `log_p` is base `p`,
//! and every ceiling of a logarithm is computed exactly on integers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::proj_ratio;
use crate::ring::{divisors, factorize, Mode, RingContext, ScaleSemantics};
use crate::scalar::{render_q, Scalar, Q};

/// `⌈log_p m⌉`: the least `e` with `p^e >= m`.
pub fn ceil_log(p: u64, m: u128) -> u32 {
    let mut e = 0;
    let mut acc: u128 = 1;
    while acc < m {
        acc = acc.saturating_mul(p as u128);
        e += 1;
    }
    e
}

/// Product over the middle primes `p_2 .. p_{r-1}`.
fn middle_factor(factors: &[(u64, u32)], n: u32) -> f64 {
    if factors.len() < 3 {
        return 1.0;
    }
    factors[1..factors.len() - 1]
        .iter()
        .map(|&(p, k)| {
            1.0 / (2.0 * (k as f64 * (p as f64).ln() + 1.0) * (k + ceil_log(p, n as u128)) as f64)
        })
        .product()
}

fn last_factor(factors: &[(u64, u32)], n: u32) -> f64 {
    let &(p, k) = factors.last().expect("N >= 2");
    1.0 / (2.0 * (k + ceil_log(p, n as u128)) as f64)
}

/// `C_{N,n}` of the maximal bound for integer-valued densities, given
/// `mweight(f, p_1) = weight`. For a prime power only the first factor applies;
/// a zero weight is read as 1.
pub fn maxn_constant(modulus: u64, n: u32, weight: u64) -> f64 {
    let factors = factorize(modulus);
    if factors.is_empty() {
        return 1.0;
    }
    let p1 = factors[0].0;
    let m = weight.max(1);
    let first = 1.0 / (2.0 * ((m as f64).ln() + 1.0) * ceil_log(p1, m as u128 * n as u128) as f64);
    let rest = if factors.len() == 1 {
        1.0
    } else {
        last_factor(&factors, n) * middle_factor(&factors, n)
    };
    (first * rest).powi(n as i32)
}

/// `D_{N,n}`. The last-prime factor is present for every `N`, prime powers included.
pub fn appendix_d(modulus: u64, n: u32) -> f64 {
    let factors = factorize(modulus);
    assert!(!factors.is_empty(), "D_(N,n) needs N >= 2");
    let p1 = factors[0].0 as f64;
    let big_n = modulus as f64;
    let log_p1 = |x: f64| x.ln() / p1.ln();
    let first = 1.0 / (2.0 * (2.0 * big_n.ln() + 1.0) * (2.0 * log_p1(big_n) + log_p1(n as f64) + 1.0));
    (first * last_factor(&factors, n) * middle_factor(&factors, n)).powi(n as i32)
}

/// `D_{N,n} / (2^n + 1)`: the constant of the maximal estimate for real densities.
pub fn appendix_constant(modulus: u64, n: u32) -> f64 {
    appendix_d(modulus, n) / (2f64.powi(n as i32) + 1.0)
}

/// Largest orthogonality ratio over the untruncated band `i`:
/// `max_v |P(Z/v)^{m-2}| / |P(Z/v)^{m-1}|` over the valuations `v` the scale sequence
/// can produce (powers of `p` for p-adic scales, every integer for factorial ones).
/// Equals the ratio at `M_i` for p-adic scales.
pub fn band_ratio(mode: Mode, semantics: ScaleSemantics, i: usize, m: usize) -> Result<Q> {
    let lo = mode.scale_value(i).ok_or(Error::NoScales)?;
    let candidates: Vec<u64> = match semantics {
        ScaleSemantics::Divisibility => divisors(lo)
            .into_iter()
            .filter(|&v| crate::ring::band_contains(mode, semantics, i, v))
            .collect(),
        ScaleSemantics::Numeric => {
            let hi = mode.scale_value(i + 1).ok_or(Error::ScaleOverflow { index: i + 1 })?;
            (lo..hi)
                .filter(|&v| match mode {
                    Mode::PAdic { p, .. } => factorize(v).iter().all(|&(q, _)| q == p),
                    _ => true,
                })
                .collect()
        }
    };
    Ok(candidates
        .into_iter()
        .map(|v| proj_ratio(v, m))
        .max()
        .unwrap_or_else(|| Q::from_integer(0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTerm {
    pub band: usize,
    pub scale: u64,
    pub next_scale: u64,
    /// Band ratio as `p/q`.
    pub ratio: String,
    pub appendix_constant: f64,
    pub term: f64,
    pub partial_sum: f64,
}

/// Partial sums of the chain series and the resulting constant.
#[derive(Clone, Debug, Serialize)]
pub struct ChainConstant {
    pub depth: usize,
    pub terms: Vec<ChainTerm>,
    /// `S^{n-1}`
    pub sum_power: f64,
    /// `S^{-(n-1)}`: the effective constant of the 2-flat maximal bound.
    pub constant: f64,
}

/// `S = Σ_{i < depth} (ratio_i / C_{M_{i+1}, n-1})^{1/(n-1)}` with the appendix constant
/// for `C`. Depends only on the scale sequence, so `depth` may exceed the truncation.
pub fn chain_constant(ctx: &RingContext, depth: usize) -> Result<ChainConstant> {
    let n = ctx.dim();
    if n < 3 {
        return Err(Error::InvalidRing("the chain needs n >= 3".into()));
    }
    let mode = ctx.mode();
    let e = 1.0 / (n - 1) as f64;
    let mut terms = Vec::with_capacity(depth);
    let mut s = 0.0;
    for i in 0..depth {
        let scale = mode.scale_value(i).ok_or(Error::ScaleOverflow { index: i })?;
        let next_scale = mode.scale_value(i + 1).ok_or(Error::ScaleOverflow { index: i + 1 })?;
        let ratio = band_ratio(mode, ctx.semantics(), i, n)?;
        let c = appendix_constant(next_scale, (n - 1) as u32);
        let term = (ratio.to_f64() / c).powf(e);
        s += term;
        terms.push(ChainTerm {
            band: i,
            scale,
            next_scale,
            ratio: render_q(&ratio),
            appendix_constant: c,
            term,
            partial_sum: s,
        });
    }
    let sum_power = s.powi((n - 1) as i32);
    Ok(ChainConstant {
        depth,
        terms,
        sum_power,
        constant: 1.0 / sum_power,
    })
}

/// Constants at one truncation: the integer maximal bound at the worst weight `N^2`,
/// the appendix constant, and the chain constant over the requested depth.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantLedger {
    pub ring: String,
    pub modulus: u64,
    pub dim: usize,
    pub semantics: ScaleSemantics,
    pub maxn_weight: u64,
    pub maxn_constant: f64,
    pub appendix_d: f64,
    pub appendix_constant: f64,
    pub chain: Option<ChainConstant>,
}

impl ConstantLedger {
    pub fn new(ctx: &RingContext, depth: usize) -> Result<Self> {
        let (modulus, n) = (ctx.modulus(), ctx.dim() as u32);
        if modulus < 2 {
            return Err(Error::InvalidRing("constants need N >= 2".into()));
        }
        let weight = modulus * modulus;
        let chain = if ctx.dim() >= 3 && ctx.num_bands().is_ok() { Some(chain_constant(ctx, depth)?) } else { None };
        Ok(Self {
            ring: ctx.summary(),
            modulus,
            dim: ctx.dim(),
            semantics: ctx.semantics(),
            maxn_weight: weight,
            maxn_constant: maxn_constant(modulus, n, weight),
            appendix_d: appendix_d(modulus, n),
            appendix_constant: appendix_constant(modulus, n),
            chain,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs()
    }

    #[test]
    fn ceil_log_is_exact() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 2), 1);
        assert_eq!(ceil_log(2, 8), 3);
        assert_eq!(ceil_log(2, 9), 4);
        assert_eq!(ceil_log(3, 3), 1);
        assert_eq!(ceil_log(3, 2), 1);
        assert_eq!(ceil_log(5, 125), 3);
    }

    #[test]
    fn appendix_regression() {
        assert!(close(appendix_d(2, 2), 0.000171495217510486));
        assert!(close(appendix_constant(2, 2), 3.42990435020972e-05));
    }

    #[test]
    fn appendix_decreasing_in_n_and_positive() {
        for big_n in 2..=12u64 {
            for n in 2..5u32 {
                assert!(appendix_constant(big_n, n + 1) < appendix_constant(big_n, n));
            }
        }
        for big_n in 2..=10_000u64 {
            let c = appendix_constant(big_n, 3);
            assert!(c > 0.0 && c <= 1.0);
        }
    }

    #[test]
    fn maxn_prime_reading() {
        // N = p prime: (2 (log m + 1) ⌈log_p (m n)⌉)^{-n}
        let m = 7u64;
        let want = (2.0 * ((m as f64).ln() + 1.0) * 2.0f64).powi(-2);
        assert!(close(maxn_constant(5, 2, m), want));
        // weight 1: (2 ⌈log_p n⌉)^{-n}
        assert!(close(maxn_constant(2, 3, 1), (2.0f64 * 2.0).powi(-3)));
    }

    #[test]
    fn maxn_two_primes_has_empty_middle() {
        // N = 12 = 2^2 3, n = 2, weight m
        let m = 5u64;
        let first = 1.0 / (2.0 * ((m as f64).ln() + 1.0) * 4.0); // ⌈log_2 10⌉ = 4
        let last = 1.0 / (2.0 * (1.0 + 1.0)); // k_r = 1, ⌈log_3 2⌉ = 1
        assert!(close(maxn_constant(12, 2, m), (first * last).powi(2)));
        // N = 30 = 2 3 5 has one middle prime
        let mid = 1.0 / (2.0 * (3f64.ln() + 1.0) * 2.0);
        let first = 1.0 / (2.0 * 1.0 * 2.0); // weight 1, ⌈log_2 3⌉ = 2
        let last = 1.0 / (2.0 * 2.0);
        assert!(close(maxn_constant(30, 3, 1), (first * mid * last).powi(3)));
    }

    #[test]
    fn chain_regression_padic_2_n3() {
        let ctx = RingContext::padic(2, 6, 3).unwrap();
        let chain = chain_constant(&ctx, 7).unwrap();
        let terms = [
            170.74932498523222,
            397.6203177977705,
            683.5137677760769,
            958.1158718293046,
            1182.2188740348452,
            1336.701676227361,
            1418.2086749525367,
        ];
        let sums = [
            170.74932498523222,
            568.3696427830027,
            1251.8834105590795,
            2209.999282388384,
            3392.218156423229,
            4728.91983265059,
            6147.128507603127,
        ];
        for (t, (want_t, want_s)) in chain.terms.iter().zip(terms.iter().zip(sums)) {
            assert!(close(t.term, *want_t), "{} vs {want_t}", t.term);
            assert!(close(t.partial_sum, want_s));
        }
        assert!(close(chain.constant, 1.0 / (6147.128507603127f64 * 6147.128507603127)));
    }

    #[test]
    fn chain_depth_one_is_first_band() {
        for ctx in [RingContext::padic(3, 2, 3).unwrap(), RingContext::profinite(3, 4).unwrap()] {
            let chain = chain_constant(&ctx, 1).unwrap();
            let m1 = ctx.mode().scale_value(1).unwrap();
            let n = ctx.dim() as u32;
            let want = appendix_constant(m1, n - 1).powf(-1.0 / (n - 1) as f64);
            assert!(close(chain.terms[0].term, want));
        }
    }

    #[test]
    fn partial_sums_monotone() {
        for ctx in [
            RingContext::padic(2, 3, 3).unwrap(),
            RingContext::profinite(2, 3).unwrap(),
            RingContext::profinite(2, 3).unwrap().with_semantics(ScaleSemantics::Numeric),
        ] {
            let chain = chain_constant(&ctx, 6).unwrap();
            assert!(chain.terms.windows(2).all(|w| w[1].partial_sum >= w[0].partial_sum));
            assert!(chain.constant > 0.0 && chain.constant <= 1.0);
        }
    }

    #[test]
    fn band_ratio_padic_is_ratio_at_scale() {
        for sem in [ScaleSemantics::Numeric, ScaleSemantics::Divisibility] {
            for i in 0..5 {
                let mode = Mode::PAdic { p: 3, ell: 4 };
                assert_eq!(band_ratio(mode, sem, i, 3).unwrap(), proj_ratio(3u64.pow(i as u32), 3));
            }
        }
    }
}
