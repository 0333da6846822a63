//! The two value lanes: exact rationals and doubles.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// Exact lane scalar.
pub type Q = Ratio<i128>;

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Whether equalities in this lane are checked with zero tolerance.
    const EXACT: bool;

    fn from_q(q: &Q) -> Self;

    fn from_u64(v: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Decimal for floats, `p/q` (or an integer) for rationals.
    fn render(&self) -> String;

    fn parse(s: &str) -> Option<Self>;

    fn powi(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_q(q: &Q) -> Self {
        *q
    }

    fn from_u64(v: u64) -> Self {
        Q::from_integer(v as i128)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        render_q(self)
    }

    fn parse(s: &str) -> Option<Self> {
        parse_q(s)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self:e}")
    }

    fn parse(s: &str) -> Option<Self> {
        match parse_q(s) {
            Some(q) => Some(Self::from_q(&q)),
            None => s.trim().parse().ok().filter(|v: &f64| v.is_finite()),
        }
    }

    fn powi(&self, e: u32) -> Self {
        f64::powi(*self, e as i32)
    }
}

pub fn render_q(q: &Q) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125` exactly.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().ok()?;
        let den: i128 = den.trim().parse().ok()?;
        return (den != 0).then(|| Q::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: i128 = match int.trim() {
            "" | "-" | "+" => 0,
            t => t.parse().ok()?,
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return None;
        }
        let den = 10i128.checked_pow(frac.len() as u32)?;
        let frac_val: i128 = frac.parse().ok()?;
        let mag = int_part.abs().checked_mul(den)?.checked_add(frac_val)?;
        return Some(Q::new(if negative { -mag } else { mag }, den));
    }
    s.parse::<i128>().ok().map(Q::from_integer)
}
