use crate::error::{Error, Result};
use crate::ring::RingContext;
use crate::scalar::{Scalar, Q};

/// A function on `(Z/NZ)^n`, stored densely by point index.
///
/// Integrals use the normalized Haar convention: `∫ f = N^{-n} Σ_x f(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<S> {
    ctx: RingContext,
    values: Vec<S>,
}

impl<S: Scalar> Density<S> {
    pub fn new(ctx: RingContext, values: Vec<S>) -> Result<Self> {
        if values.len() != ctx.num_points() {
            return Err(Error::DimensionMismatch {
                expected: ctx.num_points(),
                got: values.len(),
            });
        }
        Ok(Self { ctx, values })
    }

    pub fn from_fn(ctx: &RingContext, mut f: impl FnMut(&[u64]) -> S) -> Self {
        let mut x = vec![0u64; ctx.dim()];
        let mut values = Vec::with_capacity(ctx.num_points());
        loop {
            values.push(f(&x));
            if !ctx.next_point(&mut x) {
                break;
            }
        }
        Self {
            ctx: ctx.clone(),
            values,
        }
    }

    pub fn constant(ctx: &RingContext, c: S) -> Self {
        Self {
            ctx: ctx.clone(),
            values: vec![c; ctx.num_points()],
        }
    }

    pub fn zeros(ctx: &RingContext) -> Self {
        Self::constant(ctx, S::zero())
    }

    /// Indicator of a set of points.
    pub fn indicator<'a>(ctx: &RingContext, points: impl IntoIterator<Item = &'a Vec<u64>>) -> Self {
        let mut d = Self::zeros(ctx);
        for p in points {
            let i = ctx.index(p);
            d.values[i] = S::one();
        }
        d
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn get(&self, x: &[u64]) -> &S {
        &self.values[self.ctx.index(x)]
    }

    pub fn at(&self, index: usize) -> &S {
        &self.values[index]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Density<T> {
        Density {
            ctx: self.ctx.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn to_f64(&self) -> Density<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn sum(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// `∫ f`
    pub fn integral(&self) -> S {
        self.sum() / S::from_u64(self.values.len() as u64)
    }

    /// `∫ |f|^p`
    pub fn power_integral(&self, p: u32) -> S {
        let s = self
            .values
            .iter()
            .fold(S::zero(), |acc, v| acc + v.abs().powi(p));
        s / S::from_u64(self.values.len() as u64)
    }

    pub fn max_value(&self) -> S {
        self.values
            .iter()
            .cloned()
            .fold(S::zero(), |a, b| S::max_of(a, b))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// Largest pointwise deviation `max |f - g|`.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(S::zero(), S::max_of)
    }

    pub fn scaled(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            ctx: self.ctx.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// The function induced on `(Z/MZ)^n` by a function constant on cosets of
    /// `M (Z/NZ)^n`; values are coset averages, so non-constant input is coarse-grained.
    pub fn induce(&self, m: u64) -> Result<Self> {
        let target = self.ctx.reduced(m)?;
        let mut sums = vec![S::zero(); target.num_points()];
        let mut x = vec![0u64; self.ctx.dim()];
        let mut i = 0;
        loop {
            let y: Vec<u64> = x.iter().map(|&c| c % m).collect();
            let j = target.index(&y);
            sums[j] = sums[j].clone() + self.values[i].clone();
            i += 1;
            if !self.ctx.next_point(&mut x) {
                break;
            }
        }
        let per = S::from_u64((self.ctx.num_points() / target.num_points()) as u64);
        Ok(Self {
            ctx: target,
            values: sums.into_iter().map(|s| s / per.clone()).collect(),
        })
    }

    /// Largest `|f(x) - f(x + M y)|`: zero iff `f` is constant on cosets of `M (Z/NZ)^n`.
    pub fn coset_constancy_defect(&self, m: u64) -> S {
        let mut x = vec![0u64; self.ctx.dim()];
        let mut worst = S::zero();
        let mut i = 0;
        loop {
            let base: Vec<u64> = x.iter().map(|&c| c % m).collect();
            let d = (self.values[i].clone() - self.get(&base).clone()).abs();
            worst = S::max_of(worst, d);
            i += 1;
            if !self.ctx.next_point(&mut x) {
                break;
            }
        }
        worst
    }
}

impl Density<Q> {
    /// Checks `0 <= f <= 1` pointwise.
    pub fn check_unit_range(&self) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if *v < Q::from_integer(0) || *v > Q::from_integer(1) {
                return Err(Error::ValueOutOfRange {
                    point: self.ctx.coords(i),
                    value: crate::scalar::render_q(v),
                    range: "[0, 1]",
                });
            }
        }
        Ok(())
    }

    /// Values as non-negative integers; errors on fractional or negative entries.
    pub fn to_counts(&self) -> Result<Vec<u64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_integer() && *v.numer() >= 0 {
                    Ok(*v.numer() as u64)
                } else {
                    Err(Error::ValueOutOfRange {
                        point: self.ctx.coords(i),
                        value: crate::scalar::render_q(v),
                        range: "non-negative integers",
                    })
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_integral_is_average() {
        let ctx = RingContext::plain(3, 2).unwrap();
        let f = Density::<Q>::indicator(&ctx, &[vec![0, 0]]);
        assert_eq!(f.integral(), Q::new(1, 9));
        assert_eq!(Density::constant(&ctx, Q::from_integer(5)).integral(), Q::from_integer(5));
    }

    #[test]
    fn induce_and_constancy() {
        let ctx = RingContext::plain(4, 2).unwrap();
        let f = Density::<Q>::from_fn(&ctx, |x| Q::from_integer(((x[0] + 3 * x[1]) % 2) as i128));
        assert_eq!(f.coset_constancy_defect(2), Q::from_integer(0));
        let g = f.induce(2).unwrap();
        assert_eq!(g.ctx().modulus(), 2);
        assert_eq!(g.values(), &[0, 1, 1, 0].map(Q::from_integer));
        let h = Density::<Q>::from_fn(&ctx, |x| Q::from_integer(x[0] as i128));
        assert_eq!(h.coset_constancy_defect(2), Q::from_integer(2));
    }
}
