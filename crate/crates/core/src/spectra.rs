//! Double-Gaussian two-photon spectral densities.
//!
//! The degenerate density is a product of a phase-matching Gaussian along
//! `ω₁ − ω₂` (standard deviation `Δ`) and a pump Gaussian along
//! `ω₁ + ω₂ − 2ω₀` (standard deviation `δ`). A non-zero detuning `Ω` splits
//! the phase-matching factor into two lobes centred at `ω₁ − ω₂ = ±2Ω`.

use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};


use crate::error::{ensure, Result};
use crate::quadrature::{self, Axis, NestedLimits, Tolerance};

/// Number of standard deviations kept when truncating Gaussian supports.
pub const TRUNCATION_SIGMAS: f64 = 8.0;

/// Parameters of the double-Gaussian biphoton density, all in rad/fs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonSpectrum {
    omega0: f64,
    delta: f64,
    big_delta: f64,
    detuning: f64,
}

impl BiphotonSpectrum {
    /// `omega0` is half the pump frequency, `delta` the pump StD,
    /// `big_delta` the phase-matching StD and `detuning` the lobe offset `Ω`.
    pub fn new(omega0: f64, delta: f64, big_delta: f64, detuning: f64) -> Result<Self> {
        ensure(omega0 > 0.0 && omega0.is_finite(), "omega0", omega0, "> 0")?;
        ensure(delta > 0.0 && delta.is_finite(), "delta", delta, "> 0")?;
        ensure(
            big_delta > 0.0 && big_delta.is_finite(),
            "big_delta",
            big_delta,
            "> 0",
        )?;
        ensure(
            detuning >= 0.0 && detuning.is_finite(),
            "detuning",
            detuning,
            ">= 0",
        )?;
        Ok(Self {
            omega0,
            delta,
            big_delta,
            detuning,
        })
    }

    pub fn degenerate(omega0: f64, delta: f64, big_delta: f64) -> Result<Self> {
        Self::new(omega0, delta, big_delta, 0.0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn big_delta(&self) -> f64 {
        self.big_delta
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn is_degenerate(&self) -> bool {
        self.detuning == 0.0
    }

    /// `Δ₊² = δ² + Δ²`.
    pub fn delta_plus_sq(&self) -> f64 {
        self.delta * self.delta + self.big_delta * self.big_delta
    }

    /// `|f(ω₁, ω₂)|²` in fs²/rad².
    pub fn density(&self, omega1: f64, omega2: f64) -> f64 {
        let diff = omega1 - omega2;
        let sum = omega1 + omega2 - 2.0 * self.omega0;
        let d2 = self.big_delta * self.big_delta;
        let pump = (-(sum * sum) / (2.0 * self.delta * self.delta)).exp();
        if self.detuning == 0.0 {
            (-(diff * diff) / (2.0 * d2)).exp() * pump / (PI * self.delta * self.big_delta)
        } else {
            let a = diff - 2.0 * self.detuning;
            let b = diff + 2.0 * self.detuning;
            let lobes = (-(a * a) / (2.0 * d2)).exp() + (-(b * b) / (2.0 * d2)).exp();
            lobes * pump / (2.0 * PI * self.delta * self.big_delta)
        }
    }

    /// Integration support in rotated coordinates.
    ///
    /// Returns `(sum_axis, diff_axis)` for `u = (ν₁ + ν₂)/√2` and
    /// `v = (ν₁ − ν₂)/√2`, with `ν = ω − ω₀`. The density factorises along
    /// these axes with standard deviations `δ/√2` and `Δ/√2`; lobes sit at
    /// `v = ±√2 Ω`.
    pub fn rotated_support(&self) -> RotatedSupport {
        let su = self.delta * FRAC_1_SQRT_2;
        let sv = self.big_delta * FRAC_1_SQRT_2;
        RotatedSupport {
            u_half_width: TRUNCATION_SIGMAS * su,
            v_half_width: SQRT_2 * self.detuning + TRUNCATION_SIGMAS * sv,
            v_lobe: SQRT_2 * self.detuning,
        }
    }

    /// Integral of the density over its truncated support by nested adaptive
    /// quadrature. Expected to be 1.
    pub fn normalization(&self) -> Result<f64> {
        let sup = self.rotated_support();
        let outer = Axis::new(-sup.v_half_width, sup.v_half_width, 2)
            .with_breakpoints(&[-sup.v_lobe, sup.v_lobe]);
        let inner = Axis::new(-sup.u_half_width, sup.u_half_width, 2);
        let tol = Tolerance::<1>::relative(1e-11);
        let w0 = self.omega0;
        let r = quadrature::integrate_2d(
            |v, u| {
                let nu1 = (u + v) * FRAC_1_SQRT_2;
                let nu2 = (u - v) * FRAC_1_SQRT_2;
                [self.density(w0 + nu1, w0 + nu2)]
            },
            &outer,
            &inner,
            &tol,
            NestedLimits::default(),
        )
        .into_result(&tol)?;
        Ok(r.value[0])
    }
}

/// Half-widths of the truncated integration rectangle in rotated coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedSupport {
    pub u_half_width: f64,
    pub v_half_width: f64,
    /// Centre of the positive difference-axis lobe (0 when degenerate).
    pub v_lobe: f64,
}
