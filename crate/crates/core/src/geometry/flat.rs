use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::echelon::{echelonize, enumerate_component, ComponentForm};
use crate::error::{Error, Result};
use crate::ring::{factorize, RingContext};

/// An element of `Gr((Z/NZ)^n, k)`, optionally translated.
///
/// Generators are stored in canonical form: each CRT component is in reduced
/// echelon form with unit pivots scaled to 1, and the components are recombined
/// row by row. The basepoint is the coset representative with zeros at every
/// component's pivot columns, so two equal affine flats compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    modulus: u64,
    generators: Vec<Vec<u64>>,
    basepoint: Vec<u64>,
}

impl Flat {
    /// Canonicalizes the submodule spanned by `rows`.
    pub fn new(ctx: &RingContext, rows: Vec<Vec<u64>>) -> Result<Self> {
        let k = rows.len();
        let n = ctx.dim();
        if k == 0 || k > n {
            return Err(Error::BadFlatDimension { k, n });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let mut forms = Vec::with_capacity(ctx.factors().len());
        for f in ctx.factors() {
            let mut comp: Vec<Vec<u64>> = rows
                .iter()
                .map(|r| r.iter().map(|&c| c % f.q).collect())
                .collect();
            let pivots = echelonize(&mut comp, f.p, f.q).ok_or(Error::NotInGrassmannian { k })?;
            forms.push(ComponentForm {
                p: f.p,
                q: f.q,
                pivots,
                rows: comp,
            });
        }
        Ok(Self::from_components(ctx, k, &forms))
    }

    pub(crate) fn from_components(ctx: &RingContext, k: usize, forms: &[ComponentForm]) -> Self {
        let n = ctx.dim();
        let generators = (0..k)
            .map(|r| {
                if forms.is_empty() {
                    vec![0; n]
                } else {
                    let parts: Vec<Vec<u64>> = forms.iter().map(|f| f.rows[r].clone()).collect();
                    ctx.crt_combine(&parts)
                }
            })
            .collect();
        Self {
            modulus: ctx.modulus(),
            generators,
            basepoint: vec![0; n],
        }
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.basepoint.len()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn basepoint(&self) -> &[u64] {
        &self.basepoint
    }

    pub fn is_subspace(&self) -> bool {
        self.basepoint.iter().all(|&c| c == 0)
    }

    /// The underlying subspace (basepoint reset to zero).
    pub fn linear_part(&self) -> Flat {
        Flat {
            basepoint: vec![0; self.dim()],
            ..self.clone()
        }
    }

    /// Per-component canonical forms.
    pub fn components(&self, ctx: &RingContext) -> Vec<ComponentForm> {
        ctx.factors()
            .iter()
            .map(|f| {
                let mut rows: Vec<Vec<u64>> = self
                    .generators
                    .iter()
                    .map(|r| r.iter().map(|&c| c % f.q).collect())
                    .collect();
                let pivots = echelonize(&mut rows, f.p, f.q).expect("canonical flat");
                ComponentForm {
                    p: f.p,
                    q: f.q,
                    pivots,
                    rows,
                }
            })
            .collect()
    }

    /// `a + U` with a canonical basepoint.
    pub fn translate(&self, ctx: &RingContext, a: &[u64]) -> Flat {
        let shifted: Vec<u64> = a
            .iter()
            .zip(&self.basepoint)
            .map(|(&x, &b)| ctx.add(x, b))
            .collect();
        let forms = self.components(ctx);
        let parts: Vec<Vec<u64>> = forms
            .iter()
            .map(|f| {
                let mut x: Vec<u64> = shifted.iter().map(|&c| c % f.q).collect();
                f.reduce(&mut x);
                x
            })
            .collect();
        Flat {
            basepoint: if parts.is_empty() {
                vec![0; self.dim()]
            } else {
                ctx.crt_combine(&parts)
            },
            ..self.clone()
        }
    }

    pub fn contains(&self, ctx: &RingContext, x: &[u64]) -> bool {
        let diff: Vec<u64> = x
            .iter()
            .zip(&self.basepoint)
            .map(|(&a, &b)| ctx.reduce(a as i128 - b as i128))
            .collect();
        self.components(ctx).iter().all(|f| {
            let mut y: Vec<u64> = diff.iter().map(|&c| c % f.q).collect();
            f.reduce(&mut y);
            y.iter().all(|&c| c == 0)
        })
    }

    /// All `N^k` points of the flat, sorted lexicographically.
    pub fn points(&self, ctx: &RingContext) -> Vec<Vec<u64>> {
        let k = self.k();
        let kctx = ctx.with_dim(k);
        let mut coeffs = vec![0u64; k];
        let mut out = Vec::with_capacity(kctx.num_points());
        loop {
            let point: Vec<u64> = (0..self.dim())
                .map(|i| {
                    let s = coeffs
                        .iter()
                        .zip(&self.generators)
                        .fold(self.basepoint[i] as u128, |acc, (&c, g)| {
                            acc + c as u128 * g[i] as u128
                        });
                    (s % ctx.modulus() as u128) as u64
                })
                .collect();
            out.push(point);
            if !kctx.next_point(&mut coeffs) {
                break;
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Flats serialize as a JSON array of generator rows.
impl Serialize for Flat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.generators.len()))?;
        for row in &self.generators {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// A point of `P(Z/NZ)^{n-1}` held by its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjDirection {
    modulus: u64,
    rep: Vec<u64>,
}

impl ProjDirection {
    pub fn new(ctx: &RingContext, v: Vec<u64>) -> Result<Self> {
        let flat = Flat::new(ctx, vec![v.clone()]).map_err(|e| match e {
            Error::NotInGrassmannian { .. } => Error::NotADirection(v),
            other => other,
        })?;
        Ok(Self::from_flat(&flat))
    }

    pub(crate) fn from_flat(flat: &Flat) -> Self {
        debug_assert_eq!(flat.k(), 1);
        Self {
            modulus: flat.modulus,
            rep: flat.generators[0].clone(),
        }
    }

    pub fn rep(&self) -> &[u64] {
        &self.rep
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn to_flat(&self) -> Flat {
        Flat {
            modulus: self.modulus,
            generators: vec![self.rep.clone()],
            basepoint: vec![0; self.rep.len()],
        }
    }
}

impl Serialize for ProjDirection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(1))?;
        seq.serialize_element(&self.rep)?;
        seq.end()
    }
}

/// `|P(Z/NZ)^{m-1}|`, the number of cyclic free rank-1 summands of `(Z/NZ)^m`.
pub fn proj_size(modulus: u64, m: usize) -> u128 {
    let m = m as u32;
    factorize(modulus)
        .into_iter()
        .map(|(p, r)| {
            let p = p as u128;
            let top = p.pow(r * m) - p.pow((r - 1) * m);
            let bottom = p.pow(r) - p.pow(r - 1);
            top / bottom
        })
        .product()
}

/// `proj_size(d, n-1) / proj_size(d, n)`: the share of directions orthogonal to a
/// frequency of valuation `d`.
pub fn proj_ratio(d: u64, n: usize) -> crate::scalar::Q {
    crate::scalar::Q::new(proj_size(d, n - 1) as i128, proj_size(d, n) as i128)
}

fn gaussian_binomial(p: u128, n: u32, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (p.pow(n - i) - 1) / (p.pow(i + 1) - 1);
    }
    acc
}

/// `|Gr((Z/NZ)^n, k)|` in closed form (CRT product of local counts).
pub fn gr_size(modulus: u64, n: usize, k: usize) -> u128 {
    let (n, k) = (n as u32, k as u32);
    factorize(modulus)
        .into_iter()
        .map(|(p, e)| {
            let p = p as u128;
            gaussian_binomial(p, n, k) * p.pow((e - 1) * k * (n - k))
        })
        .product()
}

/// One canonical flat per element of `Gr((Z/NZ)^n, k)`.
pub fn enumerate_grassmannian(ctx: &RingContext, k: usize) -> Result<Vec<Flat>> {
    let n = ctx.dim();
    if k == 0 || k > n {
        return Err(Error::BadFlatDimension { k, n });
    }
    let estimate = gr_size(ctx.modulus(), n, k);
    if estimate > ctx.enumeration_cap() {
        return Err(Error::EnumerationCap {
            what: "Grassmannian",
            estimate,
            cap: ctx.enumeration_cap(),
        });
    }
    let per_component: Vec<Vec<ComponentForm>> = ctx
        .factors()
        .iter()
        .map(|f| enumerate_component(f.p, f.q, n, k))
        .collect();
    let mut out = Vec::with_capacity(estimate as usize);
    let mut idx = vec![0usize; per_component.len()];
    loop {
        let forms: Vec<ComponentForm> = idx
            .iter()
            .zip(&per_component)
            .map(|(&i, list)| list[i].clone())
            .collect();
        out.push(Flat::from_components(ctx, k, &forms));
        let mut advanced = false;
        for j in (0..idx.len()).rev() {
            idx[j] += 1;
            if idx[j] < per_component[j].len() {
                advanced = true;
                break;
            }
            idx[j] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(out)
}

/// One canonical representative per point of `P(Z/NZ)^{n-1}`.
pub fn enumerate_proj(ctx: &RingContext) -> Result<Vec<ProjDirection>> {
    let estimate = proj_size(ctx.modulus(), ctx.dim());
    if estimate > ctx.enumeration_cap() {
        return Err(Error::EnumerationCap {
            what: "projective space",
            estimate,
            cap: ctx.enumeration_cap(),
        });
    }
    Ok(enumerate_grassmannian(ctx, 1)?
        .iter()
        .map(ProjDirection::from_flat)
        .collect())
}
