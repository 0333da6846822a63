//! Quotients `(Z/NZ)^n / U` for subspaces `U`, built per CRT component by
//! eliminating pivot coordinates. A globally unit coordinate need not exist
//! (e.g. `(2,3)` mod 6), so each component picks its own pivot.

use super::echelon::ComponentForm;
use super::flat::{Flat, ProjDirection};
use crate::error::{Error, Result};
use crate::ring::RingContext;

/// Which unit coordinate of a direction serves as the eliminated pivot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// First unit coordinate per component (the canonical chart).
    #[default]
    FirstUnit,
    /// Last unit coordinate per component; an alternative chart used to check
    /// that identities do not depend on the representative choice.
    LastUnit,
}

/// Linear isomorphism `(Z/NZ)^n / U  ->  (Z/NZ)^{n-k}` with a right inverse.
#[derive(Clone, Debug)]
pub struct FlatQuotient {
    ambient: RingContext,
    target: RingContext,
    forms: Vec<ComponentForm>,
    non_pivots: Vec<Vec<usize>>,
}

impl FlatQuotient {
    pub fn new(ctx: &RingContext, flat: &Flat) -> Self {
        Self::from_forms(ctx, flat.k(), flat.components(ctx))
    }

    fn from_forms(ctx: &RingContext, k: usize, forms: Vec<ComponentForm>) -> Self {
        let n = ctx.dim();
        let non_pivots = forms.iter().map(|f| f.non_pivots(n)).collect();
        Self {
            ambient: ctx.clone(),
            target: ctx.with_dim(n - k),
            forms,
            non_pivots,
        }
    }

    pub fn ambient(&self) -> &RingContext {
        &self.ambient
    }

    /// The quotient ring `(Z/NZ)^{n-k}`.
    pub fn target(&self) -> &RingContext {
        &self.target
    }

    pub fn forward(&self, x: &[u64]) -> Vec<u64> {
        let m = self.target.dim();
        if self.forms.is_empty() {
            return vec![0; m];
        }
        let parts: Vec<Vec<u64>> = self
            .forms
            .iter()
            .zip(&self.non_pivots)
            .map(|(f, keep)| {
                let mut y: Vec<u64> = x.iter().map(|&c| c % f.q).collect();
                f.reduce(&mut y);
                keep.iter().map(|&c| y[c]).collect()
            })
            .collect();
        self.target.crt_combine(&parts)
    }

    pub fn forward_index(&self, x: &[u64]) -> usize {
        self.target.index(&self.forward(x))
    }

    /// Embeds `y` by placing zeros at every component's pivot coordinates.
    pub fn section(&self, y: &[u64]) -> Vec<u64> {
        let n = self.ambient.dim();
        if self.forms.is_empty() {
            return vec![0; n];
        }
        let parts: Vec<Vec<u64>> = self
            .forms
            .iter()
            .zip(&self.non_pivots)
            .map(|(f, keep)| {
                let mut x = vec![0u64; n];
                for (&c, &v) in keep.iter().zip(y) {
                    x[c] = v % f.q;
                }
                x
            })
            .collect();
        self.ambient.crt_combine(&parts)
    }

    /// Quotient label of every ambient point, indexed by ambient point index.
    pub fn labels(&self) -> Vec<usize> {
        let mut x = vec![0u64; self.ambient.dim()];
        let mut out = Vec::with_capacity(self.ambient.num_points());
        loop {
            out.push(self.forward_index(&x));
            if !self.ambient.next_point(&mut x) {
                break;
            }
        }
        out
    }
}

/// The quotient `Q_u = (Z/NZ)^n / ⟨u⟩` for a direction `u`.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    direction: ProjDirection,
    map: FlatQuotient,
}

impl QuotientChart {
    pub fn new(ctx: &RingContext, u: &ProjDirection) -> Self {
        Self::with_rule(ctx, u, PivotRule::FirstUnit)
    }

    pub fn with_rule(ctx: &RingContext, u: &ProjDirection, rule: PivotRule) -> Self {
        let forms = match rule {
            PivotRule::FirstUnit => u.to_flat().components(ctx),
            PivotRule::LastUnit => ctx
                .factors()
                .iter()
                .map(|f| {
                    let row: Vec<u64> = u.rep().iter().map(|&c| c % f.q).collect();
                    let piv = (0..row.len())
                        .rev()
                        .find(|&c| !row[c].is_multiple_of(f.p))
                        .expect("direction has a unit coordinate");
                    let inv = crate::ring::mod_inverse(row[piv], f.q).expect("unit");
                    let row = row
                        .iter()
                        .map(|&c| ((c as u128 * inv as u128) % f.q as u128) as u64)
                        .collect();
                    ComponentForm {
                        p: f.p,
                        q: f.q,
                        pivots: vec![piv],
                        rows: vec![row],
                    }
                })
                .collect(),
        };
        Self {
            direction: u.clone(),
            map: FlatQuotient::from_forms(ctx, 1, forms),
        }
    }

    pub fn direction(&self) -> &ProjDirection {
        &self.direction
    }

    pub fn quotient(&self) -> &FlatQuotient {
        &self.map
    }

    /// `(Z/NZ)^{n-1}`
    pub fn target(&self) -> &RingContext {
        self.map.target()
    }

    pub fn forward(&self, x: &[u64]) -> Vec<u64> {
        self.map.forward(x)
    }

    pub fn section(&self, y: &[u64]) -> Vec<u64> {
        self.map.section(y)
    }
}

/// Convenience constructor matching [`QuotientChart::new`].
pub fn quotient_chart(ctx: &RingContext, u: &ProjDirection) -> QuotientChart {
    QuotientChart::new(ctx, u)
}

/// The unique 2-flat containing `u` whose image in `Q_u` is the line `⟨w⟩`.
pub fn lift_direction(ctx: &RingContext, chart: &QuotientChart, w: &[u64]) -> Result<Flat> {
    let target = chart.target();
    if w.len() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: w.len(),
        });
    }
    let canonical = ProjDirection::new(target, w.to_vec())?;
    Flat::new(
        ctx,
        vec![chart.direction().rep().to_vec(), chart.section(canonical.rep())],
    )
}

/// A line of `(Z/p^k N_0 Z)^n` written as the CRT product of its two components.
#[derive(Clone, Debug)]
pub struct LineSplit {
    pub p_ring: RingContext,
    pub p_line: Flat,
    pub co_ring: RingContext,
    pub co_line: Flat,
}

impl LineSplit {
    /// Recombines a point of the `p`-part with a point of the coprime part.
    pub fn combine(&self, ctx: &RingContext, x_p: &[u64], x_co: &[u64]) -> Vec<u64> {
        let (q, n0) = (self.p_ring.modulus(), self.co_ring.modulus());
        let inv_q = crate::ring::mod_inverse(q % n0.max(1), n0).unwrap_or(0);
        x_p.iter()
            .zip(x_co)
            .map(|(&a, &b)| {
                // t ≡ a (mod q), t ≡ b (mod n0)
                let diff = (b as i128 - a as i128).rem_euclid(n0 as i128) as u128;
                let t = a as u128 + q as u128 * ((diff * inv_q as u128) % n0 as u128);
                (t % ctx.modulus() as u128) as u64
            })
            .collect()
    }
}

/// Splits an affine line modulo `N = p^k N_0` into its `p^k` and `N_0` parts.
pub fn line_crt_decompose(ctx: &RingContext, line: &Flat, p: u64) -> Result<LineSplit> {
    if line.k() != 1 {
        return Err(Error::BadFlatDimension {
            k: line.k(),
            n: ctx.dim(),
        });
    }
    let n = ctx.dim();
    let q = ctx
        .factors()
        .iter()
        .find(|f| f.p == p)
        .map(|f| f.q)
        .ok_or(Error::PrimeDoesNotDivide {
            p,
            modulus: ctx.modulus(),
        })?;
    let n0 = ctx.modulus() / q;
    let part = |m: u64| -> Result<(RingContext, Flat)> {
        let ring = ctx.with_dim(n).reduced(m)?;
        let dir: Vec<u64> = line.generators()[0].iter().map(|&c| c % m).collect();
        let base: Vec<u64> = line.basepoint().iter().map(|&c| c % m).collect();
        let flat = Flat::new(&ring, vec![dir])?.translate(&ring, &base);
        Ok((ring, flat))
    };
    let (p_ring, p_line) = part(q)?;
    let (co_ring, co_line) = part(n0)?;
    Ok(LineSplit {
        p_ring,
        p_line,
        co_ring,
        co_line,
    })
}
