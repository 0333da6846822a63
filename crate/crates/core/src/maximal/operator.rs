use serde_json::{json, Value};

use crate::density::Density;
use crate::error::Result;
use crate::geometry::{enumerate_grassmannian, Flat, FlatQuotient};
use crate::parallel::map_slice;
use crate::ring::RingContext;
use crate::scalar::Scalar;

/// Coset labels of every `k`-flat, computed once and reused across densities.
#[derive(Clone, Debug)]
pub struct MaximalPlan {
    ctx: RingContext,
    k: usize,
    flats: Vec<Flat>,
    labels: Vec<Vec<u32>>,
    classes: usize,
}

/// `𝒩^k f(U) = max_a N^{-k} Σ_{x ∈ U} f(a + x)` for every flat `U` of a plan, with the
/// lexicographically least achieving shift.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalProfile<S> {
    pub k: usize,
    pub values: Vec<S>,
    pub witnesses: Vec<Vec<u64>>,
}

impl MaximalPlan {
    pub fn new(ctx: &RingContext, k: usize) -> Result<Self> {
        Ok(Self::from_flats(ctx, k, enumerate_grassmannian(ctx, k)?))
    }

    pub fn from_flats(ctx: &RingContext, k: usize, flats: Vec<Flat>) -> Self {
        let labels = map_slice(&flats, |u| {
            FlatQuotient::new(ctx, u)
                .labels()
                .into_iter()
                .map(|l| l as u32)
                .collect()
        });
        Self {
            ctx: ctx.clone(),
            k,
            classes: ctx.with_dim(ctx.dim() - k).num_points(),
            flats,
            labels,
        }
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    /// Sum of `f` over every translate of flat `j`, indexed by quotient label.
    pub fn coset_sums<S: Scalar>(&self, j: usize, f: &Density<S>) -> Vec<S> {
        let mut sums = vec![S::zero(); self.classes];
        for (v, &l) in f.values().iter().zip(&self.labels[j]) {
            sums[l as usize] = sums[l as usize].clone() + v.clone();
        }
        sums
    }

    /// Best coset sum and its lexicographically least point.
    pub fn best_translate<S: Scalar>(&self, j: usize, f: &Density<S>) -> (S, usize) {
        let sums = self.coset_sums(j, f);
        let best = sums.iter().cloned().fold(sums[0].clone(), S::max_of);
        let witness = self.labels[j]
            .iter()
            .position(|&l| sums[l as usize] == best)
            .expect("max is attained");
        (best, witness)
    }

    pub fn evaluate<S: Scalar>(&self, f: &Density<S>) -> MaximalProfile<S> {
        let norm = S::from_u64((self.ctx.modulus() as usize).pow(self.k as u32) as u64);
        let idx: Vec<usize> = (0..self.flats.len()).collect();
        let (values, witnesses) = map_slice(&idx, |&j| {
            let (best, w) = self.best_translate(j, f);
            (best / norm.clone(), self.ctx.coords(w))
        })
        .into_iter()
        .unzip();
        MaximalProfile {
            k: self.k,
            values,
            witnesses,
        }
    }
}

impl<S: Scalar> MaximalProfile<S> {
    /// `avg_U value(U)^p`
    pub fn power_mean(&self, p: u32) -> S {
        let s = self.values.iter().fold(S::zero(), |a, v| a + v.powi(p));
        s / S::from_u64(self.values.len() as u64)
    }

    pub fn min_value(&self) -> S {
        self.values
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap_or_else(S::zero)
    }

    pub fn to_json(&self, flats: &[Flat]) -> Value {
        let entries: Vec<Value> = flats
            .iter()
            .zip(&self.values)
            .zip(&self.witnesses)
            .enumerate()
            .map(|(id, ((u, v), w))| json!({"id": id, "flat": u, "value": v.render(), "witness": w}))
            .collect();
        json!({"schema": 1, "k": self.k, "entries": entries})
    }

    /// Rows `id,value,witness` with the witness as space-separated residues.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,value,witness\n");
        for (id, (v, w)) in self.values.iter().zip(&self.witnesses).enumerate() {
            let w: Vec<String> = w.iter().map(u64::to_string).collect();
            out.push_str(&format!("{id},{},{}\n", v.render(), w.join(" ")));
        }
        out
    }
}

/// `𝒩^1 f` over every direction.
pub fn line_maximal<S: Scalar>(f: &Density<S>) -> Result<MaximalProfile<S>> {
    flat_maximal(f, 1)
}

/// `𝒩^k f` over every `k`-flat.
pub fn flat_maximal<S: Scalar>(f: &Density<S>, k: usize) -> Result<MaximalProfile<S>> {
    Ok(MaximalPlan::new(f.ctx(), k)?.evaluate(f))
}

/// Shift-by-shift scan over all `N^n` translates; the reference for [`MaximalPlan`].
#[cfg(any(test, feature = "oracle"))]
pub fn naive_maximal<S: Scalar>(f: &Density<S>, flats: &[Flat]) -> MaximalProfile<S> {
    let ctx = f.ctx();
    let mut values = Vec::new();
    let mut witnesses = Vec::new();
    let k = flats.first().map_or(1, Flat::k);
    for u in flats {
        let pts = u.points(ctx);
        let mut best: Option<(S, Vec<u64>)> = None;
        for ai in 0..ctx.num_points() {
            let a = ctx.coords(ai);
            let s = pts.iter().fold(S::zero(), |acc, x| {
                let y: Vec<u64> = a.iter().zip(x).map(|(&p, &q)| ctx.add(p, q)).collect();
                acc + f.get(&y).clone()
            });
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, a));
            }
        }
        let (s, a) = best.expect("nonempty ring");
        values.push(s / S::from_u64(pts.len() as u64));
        witnesses.push(a);
    }
    MaximalProfile { k, values, witnesses }
}
