//! SPDC source brightness: `R = S₀·B_ω` for a tightly focused pump with
//! walk-off, and the experimental generation-efficiency estimators.
//!
//! Two different constants share the letter κ in the literature. Here the
//! source bandwidth constant is [`KAPPA_SRC`]; the sample dispersion
//! coefficient lives in [`crate::samples`].

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::dsp::{ComplexSpectrum, EfficiencyCurve};
use crate::error::{ensure, Error, Result};
use crate::quadrature::{self, Axis, Tolerance};
use crate::units::{thz_to_rad_per_fs, C_M_PER_S, EPSILON_0};

/// `κ_src = 2π × 298 THz × √μm`, in rad/fs·√μm.
pub const KAPPA_SRC: f64 = 2.0 * PI * 0.298;

/// Crystal, pump and mode parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    /// Effective nonlinear coefficient, pm/V.
    pub d_eff: f64,
    /// mW
    pub pump_power: f64,
    /// rad/fs
    pub omega_s: f64,
    /// rad/fs
    pub omega_i: f64,
    pub n_p: f64,
    pub n_s: f64,
    pub n_i: f64,
    /// Pump walk-off angle Θ_p, rad.
    pub walkoff: f64,
    /// Common mode waist W, μm.
    pub waist: f64,
    /// Crystal length L, μm.
    pub crystal_length: f64,
    /// nm
    pub lambda_p: f64,
}

/// Factors standing in for `≪` and `≫` in the validity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityThresholds {
    /// Require `L_eff < L / overlap_factor`.
    pub overlap_factor: f64,
    /// Require `W > waist_factor · λ_p/(πΘ_p)`.
    pub waist_factor: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        Self {
            overlap_factor: 5.0,
            waist_factor: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    /// `L_eff` is not small compared to the crystal length.
    OverlapLength { l_eff: f64, crystal_length: f64 },
    /// Rayleigh length not large compared to `L_eff`.
    Divergence { waist: f64, min_waist: f64 },
}

impl core::fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ValidityWarning::OverlapLength {
                l_eff,
                crystal_length,
            } => write!(
                f,
                "effective overlap length {l_eff:.1} um is not << crystal length {crystal_length:.1} um"
            ),
            ValidityWarning::Divergence { waist, min_waist } => write!(
                f,
                "waist {waist:.2} um is not >> lambda_p/(pi Theta_p); need > {min_waist:.2} um"
            ),
        }
    }
}

impl SourceParams {
    /// BBO type-I, collinear and degenerate, pumped at 405 nm with
    /// Θ_p = 3.9°, W = 5.7 μm, L = 1 mm, P = 1 mW.
    ///
    /// `d_eff` is fixed so that `S₀/P = 125 cps/(THz·mW)`; the indices are the
    /// ordinary index of BBO near 810 nm.
    pub fn reference_bbo() -> Self {
        let omega_p = crate::units::wavelength_nm_to_omega(405.0);
        Self {
            d_eff: 0.658_274_153_5,
            pump_power: 1.0,
            omega_s: omega_p / 2.0,
            omega_i: omega_p / 2.0,
            n_p: 1.661,
            n_s: 1.661,
            n_i: 1.661,
            walkoff: 3.9f64.to_radians(),
            waist: 5.7,
            crystal_length: 1000.0,
            lambda_p: 405.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_eff", self.d_eff),
            ("pump_power", self.pump_power),
            ("omega_s", self.omega_s),
            ("omega_i", self.omega_i),
            ("n_p", self.n_p),
            ("n_s", self.n_s),
            ("n_i", self.n_i),
            ("walkoff", self.walkoff),
            ("waist", self.waist),
            ("crystal_length", self.crystal_length),
            ("lambda_p", self.lambda_p),
        ];
        for (name, v) in positive {
            ensure(v > 0.0 && v.is_finite(), name, v, "> 0")?;
        }
        Ok(())
    }

    /// `L_eff = W/Θ_p` in μm.
    pub fn overlap_length(&self) -> f64 {
        self.waist / self.walkoff
    }

    pub fn validity_warnings(&self, th: &ValidityThresholds) -> Vec<ValidityWarning> {
        let mut out = Vec::new();
        let l_eff = self.overlap_length();
        if !(l_eff < self.crystal_length / th.overlap_factor) {
            out.push(ValidityWarning::OverlapLength {
                l_eff,
                crystal_length: self.crystal_length,
            });
        }
        let min_waist = th.waist_factor * (self.lambda_p * 1e-3) / (PI * self.walkoff);
        if !(self.waist > min_waist) {
            out.push(ValidityWarning::Divergence {
                waist: self.waist,
                min_waist,
            });
        }
        out
    }
}

/// Spectral coincidence rate `S₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRate {
    /// cps per rad/fs.
    pub per_rad_per_fs: f64,
    /// cps per THz of ordinary frequency.
    pub per_thz: f64,
    /// `per_thz` divided by the pump power in mW.
    pub per_thz_mw: f64,
    pub warnings: Vec<ValidityWarning>,
}

/// `S₀ = 4d²Pω_sω_i / (3π³c³ε₀ n_p n_s n_i Θ_p²)`, evaluated in SI units.
pub fn spectral_rate_s0(p: &SourceParams, th: &ValidityThresholds) -> Result<SpectralRate> {
    p.validate()?;
    let d = p.d_eff * 1e-12;
    let power = p.pump_power * 1e-3;
    let (ws, wi) = (p.omega_s * 1e15, p.omega_i * 1e15);
    let c = C_M_PER_S;
    // Pairs per second per rad/s.
    let si = 4.0 * d * d * power * ws * wi
        / (3.0 * PI.powi(3) * c * c * c * EPSILON_0 * p.n_p * p.n_s * p.n_i * p.walkoff * p.walkoff);
    let per_rad_per_fs = si * 1e15;
    let per_thz = si * 2.0 * PI * 1e12;
    Ok(SpectralRate {
        per_rad_per_fs,
        per_thz,
        per_thz_mw: per_thz / p.pump_power,
        warnings: p.validity_warnings(th),
    })
}

/// Phase mismatch `Δk(ω_s)` in rad/μm.
pub trait PhaseMismatchModel {
    fn delta_k(&self, omega_s: f64) -> f64;
}

impl<F: Fn(f64) -> f64> PhaseMismatchModel for F {
    fn delta_k(&self, omega_s: f64) -> f64 {
        self(omega_s)
    }
}

/// Options for [`bandwidth_b`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthOptions {
    pub rel_tol: f64,
    /// Largest integrand value tolerated at the support edges.
    pub max_edge_value: Option<f64>,
}

impl Default for BandwidthOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_edge_value: Some(1e-6),
        }
    }
}

/// `B_ω = ∫ exp(−3(Δk(ω_s)·L_eff/2)²) dω_s` over `[lo, hi]` (rad/fs).
pub fn bandwidth_b<M: PhaseMismatchModel + ?Sized>(
    model: &M,
    l_eff: f64,
    support: (f64, f64),
    opts: &BandwidthOptions,
) -> Result<f64> {
    ensure(l_eff > 0.0 && l_eff.is_finite(), "l_eff", l_eff, "> 0")?;
    let (lo, hi) = support;
    ensure(hi > lo && lo.is_finite() && hi.is_finite(), "support", hi - lo, "> 0")?;
    let g = |w: f64| {
        let x = model.delta_k(w) * l_eff / 2.0;
        (-3.0 * x * x).exp()
    };
    if let Some(limit) = opts.max_edge_value {
        let edge = g(lo).max(g(hi));
        if edge > limit {
            return Err(Error::NonDecaying { edge_value: edge });
        }
    }
    let tol = Tolerance::<1>::relative(opts.rel_tol);
    let r = quadrature::integrate(|w| [g(w)], &Axis::new(lo, hi, 8), &tol, 20_000).into_result(&tol)?;
    Ok(r.value[0])
}

/// `B_ω = κ_src/√W` in rad/fs, for a waist in μm.
pub fn bandwidth_from_waist(waist: f64) -> Result<f64> {
    ensure(waist > 0.0 && waist.is_finite(), "waist", waist, "> 0")?;
    Ok(KAPPA_SRC / waist.sqrt())
}

/// FWHM of a Gaussian with integral bandwidth `b`: `√(4 ln2/π)·B`.
pub fn fwhm_from_integral(b: f64) -> f64 {
    (4.0 * LN_2 / PI).sqrt() * b
}

/// `R = S₀·B`; the units of `s0` and `b` must match.
pub fn pair_rate(s0: f64, b: f64) -> f64 {
    s0 * b
}

/// `R_generated/P = 2∫|M̃₁| dω / ∫|M̃₁| η_VIS(ω) η_VIS(ω_p − ω) dω · R_detected/P`.
///
/// Trapezoidal sums over the non-negative bins where `M̃₁` is nonzero.
/// Returns cps/mW.
pub fn estimate_generated_rate(
    m1: &ComplexSpectrum,
    eta_vis: &EfficiencyCurve,
    omega_p: f64,
    r_detected: f64,
    pump_power: f64,
) -> Result<f64> {
    ensure(omega_p > 0.0, "omega_p", omega_p, "> 0")?;
    ensure(r_detected >= 0.0, "r_detected", r_detected, ">= 0")?;
    ensure(pump_power > 0.0, "pump_power", pump_power, "> 0")?;
    let n = m1.positive_len();
    let mut num = Vec::with_capacity(n);
    let mut den = Vec::with_capacity(n);
    for k in 0..n {
        let a = m1.values()[k].norm();
        let w = m1.frequency(k);
        let eta = if a > 0.0 {
            eta_vis.eval(w)? * eta_vis.eval(omega_p - w)?
        } else {
            0.0
        };
        num.push(a);
        den.push(a * eta);
    }
    let trap = |v: &[f64]| {
        let s: f64 = v.windows(2).map(|p| 0.5 * (p[0] + p[1])).sum();
        s * m1.omega_step()
    };
    let (i_num, i_den) = (trap(&num), trap(&den));
    if i_den == 0.0 {
        return Err(Error::ZeroDenominator("efficiency-weighted M1 integral"));
    }
    Ok(2.0 * i_num / i_den * r_detected / pump_power)
}

/// `S₀/P = R_generated/(B·P)` with `B` in THz of ordinary frequency.
pub fn spectral_coincidence_efficiency(r_gen_per_mw: f64, b_thz: f64) -> Result<f64> {
    ensure(b_thz > 0.0 && b_thz.is_finite(), "b_thz", b_thz, "> 0")?;
    Ok(r_gen_per_mw / b_thz)
}

/// Integral bandwidth in rad/fs from THz of ordinary frequency.
pub fn integral_bandwidth_from_thz(b_thz: f64) -> f64 {
    thz_to_rad_per_fs(b_thz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rad_per_fs_to_thz;
    use alloc::vec;
    use num_complex::Complex64;

    #[test]
    fn reference_s0() {
        let s = spectral_rate_s0(&SourceParams::reference_bbo(), &ValidityThresholds::default()).unwrap();
        assert!((s.per_thz_mw - 125.0).abs() < 0.1, "{}", s.per_thz_mw);
        let ratio = s.per_rad_per_fs / s.per_thz;
        assert!((ratio - 1e3 / (2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn s0_scaling() {
        let th = ValidityThresholds::default();
        let p = SourceParams::reference_bbo();
        let base = spectral_rate_s0(&p, &th).unwrap().per_thz;
        let p2 = SourceParams {
            pump_power: 2.0,
            ..p
        };
        assert!((spectral_rate_s0(&p2, &th).unwrap().per_thz / base - 2.0).abs() < 1e-12);
        let p3 = SourceParams {
            walkoff: 2.0 * p.walkoff,
            ..p
        };
        assert!((spectral_rate_s0(&p3, &th).unwrap().per_thz / base - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reference_validity() {
        let p = SourceParams::reference_bbo();
        assert!((p.overlap_length() - 83.74).abs() < 0.01);
        let w = p.validity_warnings(&ValidityThresholds::default());
        assert_eq!(w.len(), 1);
        assert!(matches!(w[0], ValidityWarning::Divergence { .. }));
        let loose = ValidityThresholds {
            overlap_factor: 5.0,
            waist_factor: 2.0,
        };
        assert!(p.validity_warnings(&loose).is_empty());
    }

    #[test]
    fn linear_mismatch_bandwidth() {
        let (d, l) = (3.0, 80.0);
        let model = |w: f64| d * (w - 2.3);
        let b = bandwidth_b(&model, l, (1.3, 3.3), &BandwidthOptions::default()).unwrap();
        let exact = (PI / 3.0).sqrt() * 2.0 / (d * l);
        assert!((b / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn longer_overlap_narrows_bandwidth() {
        let opts = BandwidthOptions::default();
        let linear = |w: f64| 3.0 * (w - 2.3);
        let quadratic = |w: f64| 3.0 * (w - 2.3) * (w - 2.3);
        let b = |m: &dyn Fn(f64) -> f64, l: f64| bandwidth_b(&m, l, (1.3, 3.3), &opts).unwrap();
        // B ∝ 1/L for a linear mismatch, 1/√L for a quadratic one.
        assert!((b(&linear, 320.0) / b(&linear, 80.0) - 0.25).abs() < 1e-8);
        assert!((b(&quadratic, 320.0) / b(&quadratic, 80.0) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn flat_mismatch_gives_support_width() {
        let opts = BandwidthOptions {
            max_edge_value: None,
            ..BandwidthOptions::default()
        };
        let b = bandwidth_b(&|_: f64| 0.0, 50.0, (1.0, 1.75), &opts).unwrap();
        assert!((b - 0.75).abs() < 1e-14);
        assert!(matches!(
            bandwidth_b(&|_: f64| 0.0, 50.0, (1.0, 1.75), &BandwidthOptions::default()),
            Err(Error::NonDecaying { .. })
        ));
    }

    #[test]
    fn waist_bandwidth() {
        let b = bandwidth_from_waist(5.7).unwrap();
        assert!((rad_per_fs_to_thz(b) - 124.8).abs() < 0.05);
        assert!((rad_per_fs_to_thz(fwhm_from_integral(b)) - 117.3).abs() < 0.1);
        assert!((rad_per_fs_to_thz(bandwidth_from_waist(1.0).unwrap()) - 298.0).abs() < 1e-9);
        let b4 = bandwidth_from_waist(4.0).unwrap();
        assert!((rad_per_fs_to_thz(b4) - 149.0).abs() < 1e-9);
    }

    #[test]
    fn pair_rate_units_agree() {
        let s = spectral_rate_s0(&SourceParams::reference_bbo(), &ValidityThresholds::default()).unwrap();
        let b = bandwidth_from_waist(5.7).unwrap();
        let r1 = pair_rate(s.per_rad_per_fs, b);
        let r2 = pair_rate(s.per_thz, rad_per_fs_to_thz(b));
        assert!((r1 / r2 - 1.0).abs() < 1e-12);
        assert!((r2 - 125.0 * 124.8).abs() < 0.01 * r2);
        assert_eq!(pair_rate(0.0, b), 0.0);
    }

    fn m1_spectrum() -> ComplexSpectrum {
        let n = 1024;
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (k, x) in v.iter_mut().enumerate().take(n / 2).skip(200) {
            *x = Complex64::new(1.0 + (k % 7) as f64, 0.0);
        }
        ComplexSpectrum::from_dft(v, 0.0, 0.4, n / 4, 4, "M1").unwrap()
    }

    #[test]
    fn unit_efficiency_generated_rate() {
        let m1 = m1_spectrum();
        let wp = 2.0 * m1.frequency(400);
        let eta = EfficiencyCurve::constant(1.0, 0.0, wp).unwrap();
        let r = estimate_generated_rate(&m1, &eta, wp, 3000.0, 8.0).unwrap();
        assert!((r - 750.0).abs() < 1e-9);
        let half = EfficiencyCurve::constant(0.5, 0.0, wp).unwrap();
        let r2 = estimate_generated_rate(&m1, &half, wp, 3000.0, 8.0).unwrap();
        assert!((r2 / r - 4.0).abs() < 1e-12);
        assert!((r2 - 8.0 * 3000.0 / 8.0).abs() < 1e-9);
        assert_eq!(estimate_generated_rate(&m1, &eta, wp, 0.0, 8.0).unwrap(), 0.0);
    }

    #[test]
    fn generated_rate_is_scale_free() {
        let m1 = m1_spectrum();
        let wp = 2.0 * m1.frequency(400);
        let eta = EfficiencyCurve::new(&[(0.0, 0.2), (wp, 0.9)]).unwrap();
        let scaled = m1
            .with_values(m1.values().iter().map(|v| v * 37.0).collect(), "M1")
            .unwrap();
        let a = estimate_generated_rate(&m1, &eta, wp, 3000.0, 8.0).unwrap();
        let b = estimate_generated_rate(&scaled, &eta, wp, 3000.0, 8.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coincidence_efficiency() {
        let s = spectral_coincidence_efficiency(2700.0, 141.0).unwrap();
        assert!((s - 19.15).abs() < 0.01);
        assert!((spectral_coincidence_efficiency(5400.0, 141.0).unwrap() / s - 2.0).abs() < 1e-15);
        assert!((spectral_coincidence_efficiency(2700.0, 282.0).unwrap() / s - 0.5).abs() < 1e-15);
    }
}
