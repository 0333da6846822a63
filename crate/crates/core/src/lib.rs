//! Kakeya-type estimates over finite rings `(Z/NZ)^n`: exact Fourier analysis,
//! X-ray transforms, Kakeya maximal operators and extremal set search.

pub mod density;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod maximal;
pub mod parallel;
pub mod ring;
pub mod scalar;
pub mod search;
pub mod verify;

pub use density::Density;
pub use error::{Error, Result};
pub use ring::{Mode, RingContext, ScaleSemantics};
pub use scalar::{Scalar, Q};
