//! FFT stages of the calibration pipeline: spectrum, term extraction and
//! Hilbert envelope.

use qoct_core::Complex64;
use qoct_core::dsp::ComplexSpectrum;
use qoct_core::engine::Interferogram;
use qoct_core::{Error, Result};
use rustfft::FftPlanner;

/// Shortest interferogram accepted by [`fft_spectrum`].
pub const MIN_SAMPLES: usize = 16;

/// Apodization applied after mean removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    None,
    /// Hann window over the sampled span.
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FftOptions {
    pub zero_pad: usize,
    pub window: Window,
}

impl Default for FftOptions {
    fn default() -> Self {
        Self {
            zero_pad: 4,
            window: Window::None,
        }
    }
}

fn mean_removed(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}

fn forward(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

fn inverse(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Mean-removed, optionally windowed and zero-padded DFT of `ig`.
///
/// Unnormalized forward transform: `X_k = Σ x_n e^{−2πikn/N}` with `N` the
/// padded length.
pub fn fft_spectrum(ig: &Interferogram, opts: &FftOptions) -> Result<ComplexSpectrum> {
    let n = ig.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooShort {
            len: n,
            min: MIN_SAMPLES,
        });
    }
    if opts.zero_pad == 0 {
        return Err(Error::InvalidParameter {
            field: "zero_pad",
            value: 0.0,
            constraint: ">= 1",
        });
    }
    let mut x = mean_removed(ig.values());
    if opts.window == Window::RaisedCosine {
        let denom = (n - 1) as f64;
        for (i, v) in x.iter_mut().enumerate() {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / denom).cos();
            *v *= w;
        }
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n * opts.zero_pad];
    for (b, v) in buf.iter_mut().zip(&x) {
        b.re = *v;
    }
    forward(&mut buf);
    ComplexSpectrum::from_dft(
        buf,
        ig.tau_start(),
        ig.tau_step(),
        n,
        opts.zero_pad,
        format!("FFT[{}]", ig.label),
    )
}

/// Inverse DFT, real part, first `source_len` samples on the source τ grid.
pub fn extract_term(spec: &ComplexSpectrum) -> Result<Interferogram> {
    let mut buf = spec.values().to_vec();
    inverse(&mut buf);
    let values = buf[..spec.source_len()].iter().map(|c| c.re).collect();
    Interferogram::new(spec.tau_start(), spec.tau_step(), values, spec.label.clone())
}

/// Magnitude of the analytic signal of the mean-removed input.
pub fn envelope(ig: &Interferogram) -> Result<Interferogram> {
    let n = ig.len();
    let mut buf: Vec<Complex64> = mean_removed(ig.values())
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    forward(&mut buf);
    // Keep DC and Nyquist, double positive bins, drop negative ones.
    let half = n.div_ceil(2);
    for v in &mut buf[1..half] {
        *v *= 2.0;
    }
    for v in &mut buf[n / 2 + 1..] {
        *v = Complex64::new(0.0, 0.0);
    }
    inverse(&mut buf);
    let values = buf.iter().map(|c| c.norm()).collect();
    Interferogram::new(ig.tau_start(), ig.tau_step(), values, format!("env[{}]", ig.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ig(values: Vec<f64>, step: f64) -> Interferogram {
        Interferogram::new(-1.0, step, values, "t").unwrap()
    }

    #[test]
    fn commensurate_cosine_is_one_bin() {
        let n = 256;
        let cycles = 20.0;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * cycles * i as f64 / n as f64).cos())
            .collect();
        let s = fft_spectrum(&ig(x, 0.1), &FftOptions { zero_pad: 1, window: Window::None }).unwrap();
        let (_, mag) = s.magnitude();
        let peak = mag.iter().cloned().fold(0.0, f64::max);
        assert!((mag[20] - peak).abs() < 1e-12 * peak);
        for (k, m) in mag.iter().enumerate() {
            if k != 20 && k != n - 20 {
                assert!(*m < 1e-10 * peak, "bin {k}: {m}");
            }
        }
        let w = 2.0 * PI * cycles / (n as f64 * 0.1);
        assert!((s.frequency(20) - w).abs() < 1e-12);
    }

    #[test]
    fn constant_input_gives_zero_spectrum() {
        let s = fft_spectrum(&ig(vec![3.5; 32], 0.2), &FftOptions::default()).unwrap();
        assert!(s.values().iter().all(|v| v.norm() < 1e-12));
        let back = extract_term(&s).unwrap();
        assert!(back.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn too_short_is_rejected() {
        let e = fft_spectrum(&ig(vec![1.0; 15], 0.1), &FftOptions::default()).unwrap_err();
        assert!(matches!(e, Error::TooShort { len: 15, .. }));
    }

    #[test]
    fn round_trip_and_parseval() {
        let n = 300;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * 0.2 - 30.0;
                (2.1 * t).cos() * (-t * t / 50.0).exp() + 0.3
            })
            .collect();
        let input = ig(x, 0.2);
        for pad in [1, 3] {
            let s = fft_spectrum(&input, &FftOptions { zero_pad: pad, window: Window::None }).unwrap();
            let centered = mean_removed(input.values());
            let e_t: f64 = centered.iter().map(|v| v * v).sum();
            let e_f: f64 = s.values().iter().map(|v| v.norm_sqr()).sum();
            assert!((e_f / (s.len() as f64 * e_t) - 1.0).abs() < 1e-10);
            let back = extract_term(&s).unwrap();
            assert_eq!(back.grid(), input.grid());
            let rms = (back
                .values()
                .iter()
                .zip(&centered)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / n as f64)
                .sqrt();
            assert!(rms < 1e-10, "{rms:e}");
        }
    }

    #[test]
    fn envelope_of_gaussian_wavepacket() {
        let sigma = 8.0;
        let step = 0.1;
        let n = 2001;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * step - 100.0;
                (2.3 * t).cos() * (-t * t / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let env = envelope(&Interferogram::new(-100.0, step, x, "w").unwrap()).unwrap();
        for (i, t) in env.taus().enumerate() {
            if t.abs() < 3.0 * sigma {
                let truth = (-t * t / (2.0 * sigma * sigma)).exp();
                assert!((env.values()[i] - truth).abs() < 0.01 * truth, "t={t}");
            }
        }
    }

    #[test]
    fn envelope_of_zero_is_zero() {
        let env = envelope(&ig(vec![0.0; 64], 0.1)).unwrap();
        assert!(env.values().iter().all(|v| *v == 0.0));
    }
}
