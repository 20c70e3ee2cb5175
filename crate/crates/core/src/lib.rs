//! Weighted Bergman kernels of radial weights.

pub mod equivalent_weights;
pub mod error;
pub mod kernel;
mod lgamma;
pub mod mittag_leffler;
pub mod moments;
mod mpfft;
pub mod quadrature;
pub mod report;
pub mod series;
pub mod weights;
pub mod zeros;

pub use error::{Error, Result};
