use std::collections::{BTreeMap, HashMap};

use serde_json::json;

use super::{aggregate, corpus_density, corpus_witness, tolerance, CheckId, Comparator, Lane, Outcome, VerificationReport, VerifyConfig};
use crate::density::Density;
use crate::error::Result;
use crate::geometry::{enumerate_grassmannian, enumerate_proj, lift_direction, QuotientChart};
use crate::harmonic::{band_decomposition, charts, xray_transform};
use crate::maximal::MaximalPlan;
use crate::parallel::map_range;
use crate::ring::RingContext;
use crate::scalar::{Scalar, Q};

fn applicable(id: CheckId, ctx: &RingContext, lane: Lane) -> Option<VerificationReport> {
    if ctx.num_bands().is_err() {
        Some(VerificationReport::skipped(id, ctx, lane, "ring has no scale sequence"))
    } else if ctx.dim() < 3 {
        Some(VerificationReport::skipped(id, ctx, lane, "needs n >= 3"))
    } else {
        None
    }
}

/// Geometry shared by the plane-to-line reductions: charts of every direction,
/// the line plan on the quotient, and the 2-flat lifted from each `(u, w)`.
struct Reduction {
    charts: Vec<QuotientChart>,
    quotient_lines: MaximalPlan,
    planes: MaximalPlan,
    /// `lifts[u][w]`: index into `planes` of the 2-flat spanned by `u` and `w`.
    lifts: Vec<Vec<usize>>,
}

impl Reduction {
    fn new(ctx: &RingContext) -> Result<Self> {
        let dirs = enumerate_proj(ctx)?;
        let charts = charts(ctx, &dirs);
        let target = charts[0].target().clone();
        let qdirs = enumerate_proj(&target)?;
        let quotient_lines = MaximalPlan::from_flats(&target, 1, qdirs.iter().map(|w| w.to_flat()).collect());
        let planes = MaximalPlan::from_flats(ctx, 2, enumerate_grassmannian(ctx, 2)?);
        let index: HashMap<_, usize> = planes.flats().iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let lifts = charts
            .iter()
            .map(|chart| {
                qdirs
                    .iter()
                    .map(|w| Ok(index[&lift_direction(ctx, chart, w.rep())?]))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            charts,
            quotient_lines,
            planes,
            lifts,
        })
    }
}

/// `𝒩²|f_i|(U) = 𝒩¹(|f_i|)_u(w)` for every direction `u`, every `w ∈ P(Q_u)` and
/// `U` the 2-flat spanned by `u` and `w`, for every band `i`.
pub fn verify_projmax(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if let Some(r) = applicable(CheckId::ProjMax, ctx, cfg.lane) {
        return Ok(r);
    }
    let red = Reduction::new(ctx)?;
    match cfg.lane {
        Lane::Exact => projmax_lane::<Q>(ctx, &red, cfg),
        Lane::Float => projmax_lane::<f64>(ctx, &red, cfg),
    }
}

fn projmax_lane<S: Scalar>(ctx: &RingContext, red: &Reduction, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let outcomes = map_range(cfg.trials, |t| {
        let f: Density<S> = corpus_density(ctx, cfg.seed, t).map(S::from_q);
        let mut worst: Option<Outcome<S>> = None;
        for (i, fi) in band_decomposition(&f)?.into_iter().enumerate() {
            let g = fi.abs();
            let planes = red.planes.evaluate(&g);
            for (ui, chart) in red.charts.iter().enumerate() {
                let lines = red.quotient_lines.evaluate(&xray_transform(&g, chart));
                for (wi, &ui2) in red.lifts[ui].iter().enumerate() {
                    let d = (planes.values[ui2].clone() - lines.values[wi].clone()).abs();
                    if worst.as_ref().is_none_or(|w| d > w.slack) {
                        let mut w = corpus_witness(cfg.seed, t);
                        w["band"] = json!(i);
                        w["u"] = json!(chart.direction().rep());
                        w["w"] = json!(red.quotient_lines.flats()[wi].generators()[0]);
                        worst = Some(Outcome::new(d, w));
                    }
                }
            }
        }
        Ok(worst.expect("at least one band and direction"))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let cmp = Comparator::Equal;
    Ok(aggregate(CheckId::ProjMax, ctx, cfg.lane, cmp, tolerance(cfg.lane, cmp), outcomes)
        .detail("pairs_per_band", json!(red.lifts.iter().map(Vec::len).sum::<usize>())))
}

/// `avg_{w ∈ P(Q_u)} 𝒩¹|f_{i,u}|(w)^{n-1}` on `Q_u` equals the same average computed on the
/// induced function over `(Z/M Z)^{n-1}`, `M = gcd(M_{i+1}, N)`. The largest coset-constancy
/// defect of `|f_{i,u}|` is reported alongside.
pub fn verify_divisor_reduction(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if let Some(r) = applicable(CheckId::DivisorReduction, ctx, cfg.lane) {
        return Ok(r);
    }
    match cfg.lane {
        Lane::Exact => divisor_lane::<Q>(ctx, cfg),
        Lane::Float => divisor_lane::<f64>(ctx, cfg),
    }
}

fn divisor_lane<S: Scalar>(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let n = ctx.dim() as u32;
    let dirs = enumerate_proj(ctx)?;
    let charts = charts(ctx, &dirs);
    let target = charts[0].target().clone();
    let full = MaximalPlan::new(&target, 1)?;
    let moduli: Vec<u64> = (0..ctx.num_bands()?)
        .map(|i| ctx.band_constancy_modulus(i))
        .collect::<Result<_>>()?;
    let mut reduced: BTreeMap<u64, MaximalPlan> = BTreeMap::new();
    for &m in &moduli {
        if let std::collections::btree_map::Entry::Vacant(e) = reduced.entry(m) {
            e.insert(MaximalPlan::new(&target.reduced(m)?, 1)?);
        }
    }
    let results = map_range(cfg.trials, |t| {
        let f: Density<S> = corpus_density(ctx, cfg.seed, t).map(S::from_q);
        let mut worst: Option<Outcome<S>> = None;
        let mut defect = S::zero();
        for (i, fi) in band_decomposition(&f)?.into_iter().enumerate() {
            let m = moduli[i];
            for chart in &charts {
                let g = xray_transform(&fi, chart).abs();
                defect = S::max_of(defect, g.coset_constancy_defect(m));
                let lhs = full.evaluate(&g).power_mean(n - 1);
                let rhs = reduced[&m].evaluate(&g.induce(m)?).power_mean(n - 1);
                let d = (lhs - rhs).abs();
                if worst.as_ref().is_none_or(|w| d > w.slack) {
                    let mut w = corpus_witness(cfg.seed, t);
                    w["band"] = json!(i);
                    w["modulus"] = json!(m);
                    w["u"] = json!(chart.direction().rep());
                    worst = Some(Outcome::new(d, w));
                }
            }
        }
        Ok((worst.expect("at least one band and direction"), defect))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut defect = S::zero();
    let outcomes = results
        .into_iter()
        .map(|(o, d)| {
            defect = S::max_of(defect.clone(), d);
            o
        })
        .collect();
    let cmp = Comparator::Equal;
    Ok(aggregate(CheckId::DivisorReduction, ctx, cfg.lane, cmp, tolerance(cfg.lane, cmp), outcomes)
        .detail("constancy_moduli", json!(moduli))
        .detail("max_constancy_defect", json!(defect.render())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(trials: usize) -> VerifyConfig {
        VerifyConfig {
            seed: 3,
            trials,
            lane: Lane::Exact,
            timings: false,
        }
    }

    #[test]
    fn projmax_holds_on_small_rings() {
        for ctx in [RingContext::padic(2, 2, 3).unwrap(), RingContext::padic(3, 1, 3).unwrap()] {
            let r = verify_projmax(&ctx, &cfg(4)).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn divisor_reduction_holds_with_constancy() {
        for ctx in [RingContext::padic(2, 2, 3).unwrap(), RingContext::profinite(2, 3).unwrap()] {
            let r = verify_divisor_reduction(&ctx, &cfg(4)).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.details["max_constancy_defect"], json!("0"));
        }
    }

    #[test]
    fn plane_case_is_skipped() {
        let r = verify_projmax(&RingContext::padic(2, 2, 2).unwrap(), &cfg(1)).unwrap();
        assert!(r.is_skipped());
    }
}
