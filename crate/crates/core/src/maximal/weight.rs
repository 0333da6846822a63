use num_traits::{One, Signed, Zero};

use super::operator::MaximalPlan;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::line_crt_decompose;
use crate::scalar::{Scalar, Q};

/// The `p`-maximal weight of an integer-valued density.
///
/// For each direction the achieving line `L(u)` is the lexicographically least
/// best translate; it is split by CRT into `L_p(u) × L_1(u)` and the heaviest
/// `p`-fibre `{(x, z) : x ∈ L_p(u)}` over `z ∈ L_1(u)` is taken.
pub fn mweight(f: &Density<Q>, p: u64) -> Result<u64> {
    mweight_with_plan(&MaximalPlan::new(f.ctx(), 1)?, f, p)
}

pub fn mweight_with_plan(plan: &MaximalPlan, f: &Density<Q>, p: u64) -> Result<u64> {
    let ctx = f.ctx();
    let counts = f.to_counts()?;
    if !ctx.factors().iter().any(|fa| fa.p == p) {
        return Err(Error::PrimeDoesNotDivide {
            p,
            modulus: ctx.modulus(),
        });
    }
    let mut best = 0u64;
    for (j, u) in plan.flats().iter().enumerate() {
        let (_, w) = plan.best_translate(j, f);
        let line = u.translate(ctx, &ctx.coords(w));
        let split = line_crt_decompose(ctx, &line, p)?;
        let p_points = split.p_line.points(&split.p_ring);
        for z in split.co_line.points(&split.co_ring) {
            let s: u64 = p_points
                .iter()
                .map(|x| counts[ctx.index(&split.combine(ctx, x, &z))])
                .sum();
            best = best.max(s);
        }
    }
    Ok(best)
}

/// `g(x) = ⌈N f(x)⌉ / N` for `0 <= f <= 1`.
pub fn rounding_g(f: &Density<Q>) -> Result<Density<Q>> {
    f.check_unit_range()?;
    let n = f.ctx().modulus() as i128;
    Ok(f.map(|v| Q::new((v * n).ceil().to_integer(), n)))
}

/// Scales `f` by a rational `c` so that `c f <= 1` and `Σ_x (c f)^n >= 1`, the
/// regime in which the rounding bound holds. `c` is a multiple of `1/1000` unless
/// capped at `1 / max f`.
pub fn normalize_for_rounding(f: &Density<Q>, n: u32) -> Density<Q> {
    let max = f.max_value();
    if max.is_zero() {
        return f.clone();
    }
    let s = f.values().iter().fold(Q::zero(), |a, v| a + v.abs().powi(n));
    let approx = s.to_f64().powf(-1.0 / n as f64);
    let mut c = Q::new((approx * 1000.0).ceil() as i128, 1000);
    while c.powi(n) * s < Q::one() {
        c += Q::new(1, 1000);
    }
    let cap = max.recip();
    f.scaled(if cap < c { &cap } else { &c })
}
