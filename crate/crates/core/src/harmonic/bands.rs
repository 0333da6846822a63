//! Littlewood–Paley pieces computed spatially from coset averages.
//!
//! `P_d f(x)` averages `f` over `x + d (Z/NZ)^n`; it keeps exactly the frequencies
//! with `v(a) | d`. Möbius inversion over the divisor lattice isolates `v(a) = d`.

use std::collections::BTreeMap;

use crate::density::Density;
use crate::error::Result;
use crate::geometry::proj_ratio;
use crate::ring::{divisors, moebius, Mode, RingContext, ScaleSemantics};
use crate::scalar::{Scalar, Q};

/// `P_d f`: average over the coset `x + d (Z/NZ)^n`, for `d | N`.
pub fn coset_average<S: Scalar>(f: &Density<S>, d: u64) -> Density<S> {
    let ctx = f.ctx();
    let reduced = ctx.reduced(d).expect("d divides N");
    let mut sums = vec![S::zero(); reduced.num_points()];
    let labels = residue_labels(ctx, &reduced);
    for (i, &l) in labels.iter().enumerate() {
        sums[l] = sums[l].clone() + f.at(i).clone();
    }
    let per = S::from_u64((ctx.num_points() / reduced.num_points()) as u64);
    let means: Vec<S> = sums.into_iter().map(|s| s / per.clone()).collect();
    Density::new(ctx.clone(), labels.iter().map(|&l| means[l].clone()).collect())
        .expect("length preserved")
}

fn residue_labels(ctx: &RingContext, reduced: &RingContext) -> Vec<usize> {
    let m = reduced.modulus();
    let mut x = vec![0u64; ctx.dim()];
    let mut out = Vec::with_capacity(ctx.num_points());
    loop {
        out.push(x.iter().fold(0usize, |acc, &c| acc * m as usize + (c % m) as usize));
        if !ctx.next_point(&mut x) {
            break;
        }
    }
    out
}

/// `Π_d f`: the part of `f` with frequencies of valuation exactly `d`, given `P_e f` for every `e | N`.
fn valuation_piece<S: Scalar>(d: u64, averages: &BTreeMap<u64, Density<S>>) -> Density<S> {
    let ctx = averages.values().next().expect("nonempty").ctx().clone();
    let mut acc = Density::zeros(&ctx);
    for e in divisors(d) {
        let mu = moebius(d / e);
        if mu == 0 {
            continue;
        }
        let term = &averages[&e];
        acc = if mu > 0 { acc.add(term) } else { acc.add(&term.scaled(&-S::one())) };
    }
    acc
}

fn all_averages<S: Scalar>(f: &Density<S>) -> BTreeMap<u64, Density<S>> {
    divisors(f.ctx().modulus())
        .into_iter()
        .map(|e| (e, coset_average(f, e)))
        .collect()
}

/// Part of `f` with frequencies of valuation exactly `d`.
pub fn valuation_component<S: Scalar>(f: &Density<S>, d: u64) -> Density<S> {
    valuation_piece(d, &all_averages(f))
}

/// `f_i = Σ_{a in band i} e(-⟨x,a⟩) f̂(a)`.
pub fn band_project<S: Scalar>(f: &Density<S>, i: usize) -> Result<Density<S>> {
    let vals = f.ctx().band_valuations(i)?;
    let averages = all_averages(f);
    Ok(sum_pieces(f.ctx(), &vals, &averages))
}

fn sum_pieces<S: Scalar>(ctx: &RingContext, vals: &[u64], averages: &BTreeMap<u64, Density<S>>) -> Density<S> {
    vals.iter()
        .fold(Density::zeros(ctx), |acc, &d| acc.add(&valuation_piece(d, averages)))
}

/// All band projections `f_0, f_1, ...`; they sum to `f`.
pub fn band_decomposition<S: Scalar>(f: &Density<S>) -> Result<Vec<Density<S>>> {
    let ctx = f.ctx();
    if ctx.semantics() == ScaleSemantics::Numeric && matches!(ctx.mode(), Mode::Profinite { .. }) {
        log::warn!("numeric bands in profinite mode: band pieces need not be constant on cosets of M_(i+1)");
    }
    let averages = all_averages(f);
    (0..ctx.num_bands()?)
        .map(|i| Ok(sum_pieces(ctx, &ctx.band_valuations(i)?, &averages)))
        .collect()
}

/// `max_{d in band i, d | N} |P(Z/d)^{m-2}| / |P(Z/d)^{m-1}|`; zero for an empty band.
pub fn band_constant(ctx: &RingContext, i: usize, m: usize) -> Result<Q> {
    Ok(ctx
        .band_valuations(i)?
        .into_iter()
        .map(|d| proj_ratio(d, m))
        .max()
        .unwrap_or_else(|| Q::from_integer(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::fourier::fourier_exact;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    fn sample(ctx: &RingContext, seed: u64) -> Density<Q> {
        Density::from_fn(ctx, |x| {
            let h = x.iter().fold(seed, |h, &c| (h * 31 + c * 17 + 7) % 1009);
            q((h % 9) as i128, 1 + (h % 4) as i128)
        })
    }

    #[test]
    fn constant_lives_in_band_zero() {
        let ctx = RingContext::padic(2, 3, 2).unwrap();
        let f = Density::constant(&ctx, q(3, 5));
        let bands = band_decomposition(&f).unwrap();
        assert_eq!(bands[0], f);
        for b in &bands[1..] {
            assert!(b.values().iter().all(|v| *v == q(0, 1)));
        }
    }

    #[test]
    fn matches_spectral_projection() {
        for ctx in [
            RingContext::padic(2, 3, 2).unwrap(),
            RingContext::padic(3, 2, 2).unwrap(),
            RingContext::profinite(2, 2).unwrap(),
            RingContext::profinite(2, 2).unwrap().with_semantics(ScaleSemantics::Numeric),
            RingContext::padic(2, 2, 3).unwrap(),
        ] {
            let f = sample(&ctx, 11);
            let s = fourier_exact(&f);
            for i in 0..ctx.num_bands().unwrap() {
                let spectral = s
                    .restricted_inverse(|a| ctx.band_of(ctx.valuation(a)).unwrap() == i)
                    .unwrap();
                assert_eq!(band_project(&f, i).unwrap(), spectral, "{} band {i}", ctx.summary());
            }
        }
    }

    #[test]
    fn band_is_constant_on_cosets() {
        for ctx in [
            RingContext::padic(2, 3, 2).unwrap(),
            RingContext::profinite(2, 2).unwrap(),
            RingContext::padic(3, 2, 2).unwrap(),
        ] {
            let f = sample(&ctx, 5);
            for i in 0..ctx.num_bands().unwrap() {
                let m = ctx.band_constancy_modulus(i).unwrap();
                let fi = band_project(&f, i).unwrap();
                assert_eq!(fi.coset_constancy_defect(m), q(0, 1));
            }
        }
    }

    #[test]
    fn numeric_profinite_breaks_constancy() {
        // N = 24: band 1 = {2, 3, 4} under numeric bands, and 4 does not divide M_2 = 6
        let ctx = RingContext::profinite(3, 2).unwrap().with_semantics(ScaleSemantics::Numeric);
        let f = sample(&ctx, 3);
        let f1 = band_project(&f, 1).unwrap();
        assert!(f1.coset_constancy_defect(6) > q(0, 1));
    }

    #[test]
    fn band_constant_examples() {
        let c = RingContext::padic(2, 3, 3).unwrap();
        assert_eq!(band_constant(&c, 1, 3).unwrap(), q(3, 7));
        assert_eq!(band_constant(&c, 0, 3).unwrap(), q(1, 1));
        let c = RingContext::padic(3, 2, 2).unwrap();
        assert_eq!(band_constant(&c, 1, 2).unwrap(), q(1, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bands_sum_to_f(seed in 0u64..1000, which in 0usize..4) {
            let ctx = [
                RingContext::padic(2, 3, 2).unwrap(),
                RingContext::padic(3, 2, 2).unwrap(),
                RingContext::profinite(2, 3).unwrap(),
                RingContext::padic(2, 2, 3).unwrap(),
            ][which].clone();
            let f = sample(&ctx, seed);
            let total = band_decomposition(&f)
                .unwrap()
                .into_iter()
                .fold(Density::zeros(&ctx), |a, b| a.add(&b));
            prop_assert_eq!(total, f);
        }
    }
}
