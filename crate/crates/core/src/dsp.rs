//! Spectral calibration, Gaussian fitting and bandwidth algebra.
//!
//! The FFT-based stages (spectrum, term extraction, envelope) live in the
//! `qoct` crate; everything here works on already transformed data.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::analytic::Term;
use crate::error::{ensure, Error, Result};
use crate::units::{wavelength_nm_to_omega, C_UM_PER_FS};

/// DFT of a uniformly sampled interferogram.
///
/// Bin `k` holds frequency `k·omega_step` for `k ≤ N/2` and the negative
/// frequency `(k − N)·omega_step` above. The delay grid of the source
/// interferogram is kept so the inverse transform can restore it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    omega_start: f64,
    omega_step: f64,
    values: Vec<Complex64>,
    pub label: String,
    source_len: usize,
    zero_pad: usize,
    tau_start: f64,
    tau_step: f64,
}

impl ComplexSpectrum {
    /// Wraps DFT output of length `source_len · zero_pad`.
    pub fn from_dft(
        values: Vec<Complex64>,
        tau_start: f64,
        tau_step: f64,
        source_len: usize,
        zero_pad: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        ensure(
            tau_step > 0.0 && tau_step.is_finite(),
            "tau_step",
            tau_step,
            "> 0",
        )?;
        ensure(zero_pad >= 1, "zero_pad", zero_pad as f64, ">= 1")?;
        if source_len == 0 || values.len() != source_len * zero_pad {
            return Err(Error::GridMismatch("spectrum length != source length x zero-pad"));
        }
        Ok(Self {
            omega_start: 0.0,
            omega_step: 2.0 * PI / (values.len() as f64 * tau_step),
            values,
            label: label.into(),
            source_len,
            zero_pad,
            tau_start,
            tau_step,
        })
    }

    /// Same grid and metadata, new values.
    pub fn with_values(&self, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch("value count differs"));
        }
        Ok(Self {
            values,
            label: label.into(),
            ..self.clone()
        })
    }

    pub fn omega_start(&self) -> f64 {
        self.omega_start
    }

    pub fn omega_step(&self) -> f64 {
        self.omega_step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn zero_pad(&self) -> usize {
        self.zero_pad
    }

    pub fn tau_start(&self) -> f64 {
        self.tau_start
    }

    pub fn tau_step(&self) -> f64 {
        self.tau_step
    }

    /// Signed frequency of bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.values.len();
        if k <= n / 2 {
            self.omega_start + k as f64 * self.omega_step
        } else {
            self.omega_start - (n - k) as f64 * self.omega_step
        }
    }

    /// Number of bins with non-negative frequency.
    pub fn positive_len(&self) -> usize {
        self.values.len() / 2 + 1
    }

    /// Bin holding `−frequency(k)`.
    pub fn mirror(&self, k: usize) -> usize {
        let n = self.values.len();
        (n - k) % n
    }

    /// `(ω, |value|)` for the non-negative half.
    pub fn magnitude(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.positive_len())
            .map(|k| (self.frequency(k), self.values[k].norm()))
            .unzip()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self.source_len == other.source_len
            && self.tau_step == other.tau_step
            && self.tau_start == other.tau_start
    }
}

/// Tabulated detector quantum efficiency, linearly interpolated in ω.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCurve {
    omega: Vec<f64>,
    eta: Vec<f64>,
}

impl EfficiencyCurve {
    /// `samples` as `(ω [rad/fs], η)`, strictly increasing in ω.
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooShort {
                len: samples.len(),
                min: 2,
            });
        }
        for w in samples.windows(2) {
            ensure(
                w[1].0 > w[0].0,
                "omega",
                w[1].0,
                "strictly increasing",
            )?;
        }
        for &(w, e) in samples {
            ensure(w.is_finite(), "omega", w, "finite")?;
            ensure((0.0..=1.0).contains(&e), "efficiency", e, "0 <= eta <= 1")?;
        }
        Ok(Self {
            omega: samples.iter().map(|s| s.0).collect(),
            eta: samples.iter().map(|s| s.1).collect(),
        })
    }

    /// `samples` as `(λ [nm], η)` in any order.
    pub fn from_wavelengths(samples: &[(f64, f64)]) -> Result<Self> {
        for &(l, _) in samples {
            ensure(l > 0.0 && l.is_finite(), "wavelength_nm", l, "> 0")?;
        }
        let mut pts: Vec<(f64, f64)> = samples
            .iter()
            .map(|&(l, e)| (wavelength_nm_to_omega(l), e))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(&pts)
    }

    /// Flat efficiency `eta` on `[omega_min, omega_max]`.
    pub fn constant(eta: f64, omega_min: f64, omega_max: f64) -> Result<Self> {
        Self::new(&[(omega_min, eta), (omega_max, eta)])
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[0]
    }

    pub fn omega_max(&self) -> f64 {
        self.omega[self.omega.len() - 1]
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omega.iter().copied().zip(self.eta.iter().copied())
    }

    /// Interpolated efficiency. Extrapolation is an error.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        let (lo, hi) = (self.omega_min(), self.omega_max());
        if !(omega >= lo && omega <= hi) {
            return Err(Error::EfficiencyOutOfRange {
                omega,
                min: lo,
                max: hi,
            });
        }
        let i = self.omega.partition_point(|&w| w <= omega);
        if i >= self.omega.len() {
            return Ok(self.eta[self.eta.len() - 1]);
        }
        let i = i.max(1);
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let t = (omega - w0) / (w1 - w0);
        Ok(self.eta[i - 1] + t * (self.eta[i] - self.eta[i - 1]))
    }
}

/// Coincidence channel a zone reads from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    VisVis,
    IrVis,
}

/// Dichroic split and zone layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneConfig {
    omega_p: f64,
    delta_c: f64,
    zone5_right: f64,
}

impl ZoneConfig {
    /// `delta_c = ω_p/2 − ω_c`; zone 5 ends at `3ω_p/4`.
    pub fn new(omega_p: f64, delta_c: f64) -> Result<Self> {
        Self::with_zone5_right(omega_p, delta_c, 0.75 * omega_p)
    }

    pub fn with_zone5_right(omega_p: f64, delta_c: f64, zone5_right: f64) -> Result<Self> {
        ensure(omega_p > 0.0 && omega_p.is_finite(), "omega_p", omega_p, "> 0")?;
        ensure(delta_c > 0.0, "delta_c", delta_c, "> 0")?;
        ensure(
            2.0 * delta_c < omega_p / 3.0,
            "delta_c",
            delta_c,
            "2 delta_c < omega_p/3",
        )?;
        ensure(
            omega_p / 3.0 < omega_p / 2.0 - delta_c,
            "delta_c",
            delta_c,
            "omega_p/3 < omega_p/2 - delta_c",
        )?;
        ensure(
            zone5_right > omega_p / 2.0 + delta_c && zone5_right < omega_p,
            "zone5_right",
            zone5_right,
            "omega_p/2 + delta_c < zone5_right < omega_p",
        )?;
        Ok(Self {
            omega_p,
            delta_c,
            zone5_right,
        })
    }

    /// From pump and dichroic cut-on wavelengths in nm.
    pub fn from_wavelengths(lambda_p_nm: f64, lambda_c_nm: f64) -> Result<Self> {
        let omega_p = wavelength_nm_to_omega(lambda_p_nm);
        let omega_c = wavelength_nm_to_omega(lambda_c_nm);
        Self::new(omega_p, omega_p / 2.0 - omega_c)
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn delta_c(&self) -> f64 {
        self.delta_c
    }

    pub fn zone5_right(&self) -> f64 {
        self.zone5_right
    }
}

/// One calibration zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zone {
    /// 1 to 5.
    pub index: u8,
    pub lo: f64,
    pub hi: f64,
    pub term: Term,
    pub channel: Channel,
    /// ½ where both visible photons reach the same detector.
    pub factor: f64,
}

impl Zone {
    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.lo && omega < self.hi
    }

    /// Efficiency product the measured magnitude is divided by.
    pub fn recipe(&self, omega: f64, vis: &EfficiencyCurve, ir: &EfficiencyCurve, omega_p: f64) -> Result<f64> {
        let v = match self.index {
            1 => vis.eval((omega_p + omega) / 2.0)? * vis.eval((omega_p - omega) / 2.0)?,
            2 => vis.eval((omega_p + omega) / 2.0)? * ir.eval((omega_p - omega) / 2.0)?,
            3 => ir.eval(omega)? * vis.eval(omega_p - omega)?,
            4 => vis.eval(omega)? * vis.eval(omega_p - omega)?,
            _ => vis.eval(omega)? * ir.eval(omega_p - omega)?,
        };
        Ok(self.factor * v)
    }
}

/// The five calibration zones, ordered by frequency.
pub fn zones(cfg: &ZoneConfig) -> [Zone; 5] {
    let (wp, dc) = (cfg.omega_p, cfg.delta_c);
    let z = |index, lo, hi, term, channel, factor| Zone {
        index,
        lo,
        hi,
        term,
        channel,
        factor,
    };
    [
        z(1, 0.0, 2.0 * dc, Term::M0, Channel::VisVis, 0.5),
        z(2, 2.0 * dc, wp / 3.0, Term::M0, Channel::IrVis, 1.0),
        z(3, wp / 3.0, wp / 2.0 - dc, Term::M1, Channel::IrVis, 1.0),
        z(4, wp / 2.0 - dc, wp / 2.0 + dc, Term::M1, Channel::VisVis, 0.5),
        z(5, wp / 2.0 + dc, cfg.zone5_right, Term::M1, Channel::IrVis, 1.0),
    ]
}

fn zone_at(zs: &[Zone; 5], omega: f64) -> Option<&Zone> {
    zs.iter().find(|z| z.contains(omega))
}

/// Divides each in-zone bin of the term's channels by the zone recipe and
/// zeroes everything else. Mirror bins get the same factor.
pub fn correct_and_combine(
    spec_vv: &ComplexSpectrum,
    spec_iv: &ComplexSpectrum,
    vis: &EfficiencyCurve,
    ir: &EfficiencyCurve,
    cfg: &ZoneConfig,
    term: Term,
) -> Result<ComplexSpectrum> {
    if !spec_vv.same_grid(spec_iv) {
        return Err(Error::GridMismatch("VIS-VIS and IR-VIS spectra"));
    }
    if term == Term::M2 {
        return Err(Error::CaseMismatch("only M0 and M1 have calibration zones"));
    }
    let zs = zones(cfg);
    let mut out = vec![Complex64::new(0.0, 0.0); spec_vv.len()];
    for k in 0..spec_vv.positive_len() {
        let omega = spec_vv.frequency(k);
        let Some(zone) = zone_at(&zs, omega).filter(|z| z.term == term) else {
            continue;
        };
        let src = match zone.channel {
            Channel::VisVis => spec_vv,
            Channel::IrVis => spec_iv,
        };
        let f = zone.recipe(omega, vis, ir, cfg.omega_p)?;
        if f <= 0.0 {
            return Err(Error::ZeroDenominator("zone efficiency recipe"));
        }
        out[k] = src.values[k] / f;
        let m = spec_vv.mirror(k);
        if m != k {
            out[m] = src.values[m] / f;
        }
    }
    let label = match term {
        Term::M0 => "M0",
        _ => "M1",
    };
    spec_vv.with_values(out, label)
}

/// Forward model of detection: multiplies every bin in the zones read from
/// `channel` by that zone's recipe. Other bins are left unchanged.
pub fn apply_efficiency(
    truth: &ComplexSpectrum,
    vis: &EfficiencyCurve,
    ir: &EfficiencyCurve,
    cfg: &ZoneConfig,
    channel: Channel,
) -> Result<ComplexSpectrum> {
    let zs = zones(cfg);
    let mut out = truth.values.clone();
    for k in 0..truth.positive_len() {
        let omega = truth.frequency(k);
        let Some(zone) = zone_at(&zs, omega).filter(|z| z.channel == channel) else {
            continue;
        };
        let f = zone.recipe(omega, vis, ir, cfg.omega_p)?;
        out[k] *= f;
        let m = truth.mirror(k);
        if m != k {
            out[m] *= f;
        }
    }
    truth.with_values(out, truth.label.clone())
}

/// Result of a least-squares Gaussian fit `A·exp(−(x−x₀)²/2σ²) + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPeakFit {
    pub center: f64,
    pub std: f64,
    pub amplitude: f64,
    /// Constant offset `c`; zero unless fitted.
    pub offset: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

impl GaussianPeakFit {
    pub fn fwhm(&self) -> f64 {
        bandwidth_convert(self.std, BandwidthMeasure::Std, BandwidthMeasure::Fwhm)
    }

    /// `residual_rms / |amplitude|`.
    pub fn relative_residual(&self) -> f64 {
        self.residual_rms / self.amplitude.abs()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = (x - self.center) / self.std;
        self.amplitude * (-0.5 * d * d).exp() + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub with_offset: bool,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            with_offset: false,
            max_iterations: 200,
        }
    }
}

fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for c in 0..N {
        let p = (c..N).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c] == 0.0 || !a[p][c].is_finite() {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..N {
            let f = a[r][c] / a[c][c];
            for k in c..N {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let s: f64 = (r + 1..N).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn model(p: &[f64; 4], x: f64) -> (f64, [f64; 4]) {
    let [a, mu, sigma, c] = *p;
    let d = x - mu;
    let g = (-0.5 * d * d / (sigma * sigma)).exp();
    let jac = [
        g,
        a * g * d / (sigma * sigma),
        a * g * d * d / (sigma * sigma * sigma),
        1.0,
    ];
    (a * g + c, jac)
}

fn chi2(p: &[f64; 4], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - model(p, x).0;
            r * r
        })
        .sum()
}

fn lm_step<const N: usize>(p: &[f64; 4], xs: &[f64], ys: &[f64], lambda: f64) -> Option<[f64; 4]> {
    let mut jtj = [[0.0; N]; N];
    let mut jtr = [0.0; N];
    for (&x, &y) in xs.iter().zip(ys) {
        let (m, j) = model(p, x);
        let r = y - m;
        for a in 0..N {
            jtr[a] += j[a] * r;
            for b in 0..N {
                jtj[a][b] += j[a] * j[b];
            }
        }
    }
    for a in 0..N {
        jtj[a][a] += lambda * jtj[a][a].max(1e-300);
    }
    let d = solve(jtj, jtr)?;
    let mut q = *p;
    for a in 0..N {
        q[a] += d[a];
    }
    Some(q)
}

/// Levenberg–Marquardt fit of a single Gaussian peak.
///
/// Starts from weighted moments of the baseline-subtracted data.
pub fn fit_gaussian(xs: &[f64], ys: &[f64], opts: &FitOptions) -> Result<GaussianPeakFit> {
    let min_len = if opts.with_offset { 5 } else { 4 };
    if xs.len() != ys.len() {
        return Err(Error::GridMismatch("x and y lengths differ"));
    }
    if xs.len() < min_len {
        return Err(Error::TooShort {
            len: xs.len(),
            min: min_len,
        });
    }
    let base = if opts.with_offset {
        ys.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let (mut sw, mut swx) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let w = (y - base).max(0.0);
        sw += w;
        swx += w * x;
    }
    if !(sw > 0.0) {
        return Err(Error::ZeroDenominator("peak weight"));
    }
    let mu0 = swx / sw;
    let var0: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - base).max(0.0) * (x - mu0) * (x - mu0))
        .sum::<f64>()
        / sw;
    let peak = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - base;
    let span = xs[xs.len() - 1] - xs[0];
    let sigma0 = if var0 > 0.0 { var0.sqrt() } else { span.abs() / 10.0 };
    let mut p = [peak, mu0, sigma0, base];

    let mut lambda = 1e-3;
    let mut best = chi2(&p, xs, ys);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let step = if opts.with_offset {
            lm_step::<4>(&p, xs, ys, lambda)
        } else {
            lm_step::<3>(&p, xs, ys, lambda)
        };
        let accepted = match step {
            Some(q) if q[2] != 0.0 && q.iter().all(|v| v.is_finite()) => {
                let c = chi2(&q, xs, ys);
                if c <= best {
                    // Centre and offset are judged against the width and height.
                    let tol = 1e-10;
                    let (a, sig) = (q[0].abs(), q[2].abs());
                    let small = (q[0] - p[0]).abs() <= tol * a
                        && (q[1] - p[1]).abs() <= tol * sig
                        && (q[2] - p[2]).abs() <= tol * sig
                        && (q[3] - p[3]).abs() <= tol * a;
                    let flat = best - c <= 1e-13 * best;
                    p = q;
                    best = c;
                    if small || (flat && lambda < 1.0) {
                        converged = true;
                    }
                    true
                } else {
                    false
                }
            }
            _ => false,
        };
        if converged || best == 0.0 {
            converged = true;
            break;
        }
        if accepted {
            lambda = (lambda / 10.0).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e16 {
                // No descent direction left: at a minimum to working precision.
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::FitNonConvergence { iterations });
    }
    Ok(GaussianPeakFit {
        center: p[1],
        std: p[2].abs(),
        amplitude: p[0],
        offset: if opts.with_offset { p[3] } else { 0.0 },
        residual_rms: (best / xs.len() as f64).sqrt(),
        iterations,
    })
}

/// Gaussian bandwidth measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BandwidthMeasure {
    Std,
    Fwhm,
    /// Area of the unit-height peak, `√(2π)·StD`.
    Integral,
}

impl BandwidthMeasure {
    fn per_std(self) -> f64 {
        match self {
            BandwidthMeasure::Std => 1.0,
            BandwidthMeasure::Fwhm => (8.0 * LN_2).sqrt(),
            BandwidthMeasure::Integral => (2.0 * PI).sqrt(),
        }
    }
}

/// Converts between bandwidth measures of a Gaussian peak.
pub fn bandwidth_convert(value: f64, from: BandwidthMeasure, to: BandwidthMeasure) -> f64 {
    if from == to {
        return value;
    }
    value / from.per_std() * to.per_std()
}

/// `√(FWHM² − (FWHM_p/4)²)`: removes the broadening caused by stage jitter.
pub fn broadening_correction(fwhm_measured: f64, fwhm_pump_peak: f64) -> Result<f64> {
    ensure(
        fwhm_measured >= 0.0 && fwhm_measured.is_finite(),
        "fwhm_measured",
        fwhm_measured,
        ">= 0",
    )?;
    ensure(
        fwhm_pump_peak >= 0.0 && fwhm_pump_peak.is_finite(),
        "fwhm_pump_peak",
        fwhm_pump_peak,
        ">= 0",
    )?;
    let broad = fwhm_pump_peak / 4.0;
    if fwhm_measured < broad {
        return Err(Error::ImaginaryResult {
            measured: fwhm_measured,
            broadening: broad,
        });
    }
    Ok(((fwhm_measured - broad) * (fwhm_measured + broad)).sqrt())
}

/// Axial resolution `2 ln2 · c / FWHM_ω` in μm.
pub fn axial_resolution(fwhm_omega: f64) -> Result<f64> {
    ensure(
        fwhm_omega > 0.0 && fwhm_omega.is_finite(),
        "fwhm_omega",
        fwhm_omega,
        "> 0",
    )?;
    Ok(2.0 * LN_2 * C_UM_PER_FS / fwhm_omega)
}
