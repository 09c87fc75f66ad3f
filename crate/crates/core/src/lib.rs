//! Numerical core for quantum optical coherence tomography with a Michelson
//! interferometer.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`spectra`]: double-Gaussian two-photon spectral densities,
//! * [`samples`]: single-layer sample response functions `H(ω)`,
//! * [`engine`]: brute-force quadrature of the coincidence interferogram terms,
//! * [`analytic`]: closed forms for the four spectrum/sample regimes,
//! * [`dsp`]: efficiency calibration zones, Gaussian fitting and bandwidth algebra,
//! * [`source`]: SPDC brightness and generation-efficiency estimators.
//!
//! Units are fixed throughout: angular frequency in rad/fs, time in fs, length
//! in μm. See [`units`].
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod dsp;
pub mod engine;
pub mod error;
pub mod faddeeva;
pub mod quadrature;
pub mod samples;
pub mod source;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
