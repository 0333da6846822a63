//! Fourier and X-ray transforms, band projections and the spectral identities.

mod bands;
pub mod cyclotomic;
mod fourier;
pub mod io;
mod xray;

pub use bands::{band_constant, band_decomposition, band_project, coset_average, valuation_component};
#[cfg(any(test, feature = "oracle"))]
pub use fourier::naive_dft;
pub use fourier::{
    dft, fourier_exact, fourier_float, orthogonal_indices, valuation_classes, ComplexLane, CyclotomicLane,
    ExactSpectrum, Spectrum, TransformLane,
};
pub use xray::{charts, pushforward, spatial_form, weighted_energy, xray_power_average, xray_transform};
