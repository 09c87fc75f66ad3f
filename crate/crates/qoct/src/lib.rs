//! Std companion to `qoct-core`: FFT pipeline stages, parallel grid
//! evaluation, file formats, run configuration and the acceptance self-test.

pub mod config;
pub mod error;
pub mod fft;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod selftest;

pub use error::{AppError, AppResult};
