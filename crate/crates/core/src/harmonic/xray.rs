use crate::density::Density;
use crate::geometry::{proj_ratio, FlatQuotient, ProjDirection, QuotientChart};
use crate::ring::RingContext;
use crate::scalar::{Scalar, Q};

/// Pushes `f` forward along a flat: `g(y) = N^{-k} Σ_{x ↦ y} f(x)` on `(Z/NZ)^{n-k}`.
pub fn pushforward<S: Scalar>(f: &Density<S>, quotient: &FlatQuotient) -> Density<S> {
    let target = quotient.target();
    let mut sums = vec![S::zero(); target.num_points()];
    for (i, label) in quotient.labels().into_iter().enumerate() {
        sums[label] = sums[label].clone() + f.at(i).clone();
    }
    let per = S::from_u64((f.ctx().num_points() / target.num_points()) as u64);
    Density::new(target.clone(), sums.into_iter().map(|s| s / per.clone()).collect())
        .expect("one value per quotient point")
}

/// `f_u(y) = N^{-1} Σ_t f(section(y) + t u)` on `Q_u`.
pub fn xray_transform<S: Scalar>(f: &Density<S>, chart: &QuotientChart) -> Density<S> {
    pushforward(f, chart.quotient())
}

/// `N^{-n-1} Σ_x Σ_t f(x) f(x + t u)` for real `f`.
pub fn spatial_form<S: Scalar>(f: &Density<S>, u: &ProjDirection) -> S {
    let ctx = f.ctx();
    let n = ctx.modulus();
    let mut total = S::zero();
    let mut x = vec![0u64; ctx.dim()];
    let mut i = 0;
    loop {
        let fx = f.at(i).clone();
        if !fx.is_zero() {
            let mut inner = S::zero();
            for t in 0..n {
                let y: Vec<u64> = x
                    .iter()
                    .zip(u.rep())
                    .map(|(&a, &b)| ctx.add(a, ctx.mul(t, b)))
                    .collect();
                inner = inner + f.get(&y).clone();
            }
            total = total + fx * inner;
        }
        i += 1;
        if !ctx.next_point(&mut x) {
            break;
        }
    }
    total / S::from_u64(n * ctx.num_points() as u64)
}

/// `avg_u ∫_{Q_u} |f_u|^p` over the given charts.
pub fn xray_power_average<S: Scalar>(f: &Density<S>, charts: &[QuotientChart], p: u32) -> S {
    let per: Vec<S> = crate::parallel::map_slice(charts, |c| xray_transform(f, c).power_integral(p));
    per.into_iter().fold(S::zero(), |a, b| a + b) / S::from_u64(charts.len() as u64)
}

/// `Σ_d ratio(d, n) · T_d` for per-valuation energies `T_d`.
pub fn weighted_energy(energies: &[(u64, Q)], n: usize) -> Q {
    energies.iter().map(|(d, e)| proj_ratio(*d, n) * e).sum()
}

/// Every chart of `P(Z/NZ)^{n-1}` for the directions given.
pub fn charts(ctx: &RingContext, directions: &[ProjDirection]) -> Vec<QuotientChart> {
    crate::parallel::map_slice(directions, |u| QuotientChart::new(ctx, u))
}
