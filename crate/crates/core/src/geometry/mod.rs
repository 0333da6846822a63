//! Projective spaces and Grassmannians over `Z/NZ`, quotient charts, and the
//! CRT decomposition of lines.

pub mod echelon;
mod flat;
mod quotient;

pub use flat::{
    enumerate_grassmannian, enumerate_proj, gr_size, proj_ratio, proj_size, Flat, ProjDirection,
};
pub use quotient::{
    lift_direction, line_crt_decompose, quotient_chart, FlatQuotient, LineSplit, PivotRule,
    QuotientChart,
};
