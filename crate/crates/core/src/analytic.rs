//! Closed-form interferogram terms for the four spectrum/sample regimes.
//!
//! Notation: `s = T − τ`, `R = r²`, `Δ₊² = δ² + Δ²`, `q = δ²Δ²κ²`.
//!
//! The exact dispersive forms are evaluated from the Gaussian integrals
//! directly. They reduce to the non-dispersive forms at `κ = 0` and to the
//! degenerate ones at `Ω = 0`. [`DispersiveM2Form::ErfAugmented`] keeps the
//! alternative `M₂` expression with the bracket `[4 + 2 erf(·)]`, which does
//! not agree with quadrature; it is available for comparison only.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::engine::{check_sampling, Interferogram, KernelKind, TauGrid, TermValues};
use crate::error::{Error, Result};
use crate::faddeeva;
use crate::samples::SampleResponse;
use crate::spectra::BiphotonSpectrum;

/// Spectrum/sample regime, with the exact or simplified variant for the
/// dispersive regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeCase {
    DegNoDisp,
    NonDegNoDisp,
    DegDispExact,
    DegDispSimplified,
    NonDegDispExact,
    NonDegDispSimplified,
}

impl RegimeCase {
    pub const ALL: [RegimeCase; 6] = [
        RegimeCase::DegNoDisp,
        RegimeCase::NonDegNoDisp,
        RegimeCase::DegDispExact,
        RegimeCase::DegDispSimplified,
        RegimeCase::NonDegDispExact,
        RegimeCase::NonDegDispSimplified,
    ];

    /// Case number 1–6 in the order of [`RegimeCase::ALL`].
    pub fn number(self) -> u8 {
        match self {
            RegimeCase::DegNoDisp => 1,
            RegimeCase::NonDegNoDisp => 2,
            RegimeCase::DegDispExact => 3,
            RegimeCase::DegDispSimplified => 4,
            RegimeCase::NonDegDispExact => 5,
            RegimeCase::NonDegDispSimplified => 6,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).wrapping_sub(1)).copied()
    }

    pub fn is_degenerate(self) -> bool {
        matches!(
            self,
            RegimeCase::DegNoDisp | RegimeCase::DegDispExact | RegimeCase::DegDispSimplified
        )
    }

    pub fn is_dispersive(self) -> bool {
        !matches!(self, RegimeCase::DegNoDisp | RegimeCase::NonDegNoDisp)
    }

    pub fn is_simplified(self) -> bool {
        matches!(
            self,
            RegimeCase::DegDispSimplified | RegimeCase::NonDegDispSimplified
        )
    }

    /// The most specific exact case describing `spec` and `sample`.
    pub fn exact_for(spec: &BiphotonSpectrum, sample: &SampleResponse) -> Self {
        match (spec.is_degenerate(), sample.kappa() == 0.0) {
            (true, true) => RegimeCase::DegNoDisp,
            (false, true) => RegimeCase::NonDegNoDisp,
            (true, false) => RegimeCase::DegDispExact,
            (false, false) => RegimeCase::NonDegDispExact,
        }
    }

    fn check(self, spec: &BiphotonSpectrum, sample: &SampleResponse) -> Result<()> {
        if self.is_degenerate() && !spec.is_degenerate() {
            return Err(Error::CaseMismatch("degenerate case needs detuning = 0"));
        }
        if !self.is_dispersive() && sample.kappa() != 0.0 {
            return Err(Error::CaseMismatch("non-dispersive case needs kappa = 0"));
        }
        if self.is_simplified() && sample.kappa() <= 0.0 {
            return Err(Error::CaseMismatch("simplified forms need kappa > 0"));
        }
        if (spec.omega0() - sample.omega0()).abs() > 1e-12 * spec.omega0() {
            return Err(Error::CaseMismatch(
                "sample expansion centre differs from the spectrum's omega0",
            ));
        }
        Ok(())
    }
}

/// Dimensionless quantities controlling the validity of the simplified forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeGuards {
    /// `δ²Δ²κ²`
    pub dispersion_cancellation: f64,
    /// `δ/Δ`
    pub narrowband_pump: f64,
    /// `κΔ²`
    pub dispersion_significance: f64,
}

impl RegimeGuards {
    pub fn evaluate(spec: &BiphotonSpectrum, sample: &SampleResponse) -> Self {
        let (d, dd, k) = (spec.delta(), spec.big_delta(), sample.kappa());
        Self {
            dispersion_cancellation: d * d * dd * dd * k * k,
            narrowband_pump: d / dd,
            dispersion_significance: k * dd * dd,
        }
    }

    pub fn violations(&self, th: &GuardThresholds) -> Vec<GuardViolation> {
        let mut out = Vec::new();
        if !(self.dispersion_cancellation < th.max_dispersion_cancellation) {
            out.push(GuardViolation::DispersionCancellation {
                value: self.dispersion_cancellation,
                limit: th.max_dispersion_cancellation,
            });
        }
        if !(self.narrowband_pump < th.max_narrowband_pump) {
            out.push(GuardViolation::NarrowbandPump {
                value: self.narrowband_pump,
                limit: th.max_narrowband_pump,
            });
        }
        if !(self.dispersion_significance > th.min_dispersion_significance) {
            out.push(GuardViolation::DispersionSignificance {
                value: self.dispersion_significance,
                limit: th.min_dispersion_significance,
            });
        }
        out
    }
}

/// Thresholds standing in for the asymptotic `≪`/`≫` conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardThresholds {
    pub max_dispersion_cancellation: f64,
    pub max_narrowband_pump: f64,
    pub min_dispersion_significance: f64,
}

impl Default for GuardThresholds {
    fn default() -> Self {
        Self {
            max_dispersion_cancellation: 0.01,
            max_narrowband_pump: 0.01,
            min_dispersion_significance: 10.0,
        }
    }
}

/// A failed regime guard. Reported as a warning, never as an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuardViolation {
    DispersionCancellation { value: f64, limit: f64 },
    NarrowbandPump { value: f64, limit: f64 },
    DispersionSignificance { value: f64, limit: f64 },
}

impl core::fmt::Display for GuardViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GuardViolation::DispersionCancellation { value, limit } => {
                write!(f, "out of regime: delta^2 Delta^2 kappa^2 = {value:e} is not < {limit}")
            }
            GuardViolation::NarrowbandPump { value, limit } => {
                write!(f, "out of regime: delta/Delta = {value:e} is not < {limit}")
            }
            GuardViolation::DispersionSignificance { value, limit } => {
                write!(f, "out of regime: kappa Delta^2 = {value} is not > {limit}")
            }
        }
    }
}

/// Which expression to use for `M₂` in the exact dispersive cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersiveM2Form {
    /// `2R·Re[e^{2iω₀s} e^{−δ²s²/2a + 2iκΩ²/b} / (√a √b)]`, `a = 1 − iκδ²`,
    /// `b = 1 − iκΔ²`.
    #[default]
    Gaussian,
    /// `(R/2)·Re{… [4 + 2 erf(·)]}` with its alternative `Ω²` exponent.
    ErfAugmented,
}

/// Closed-form evaluator for one case, spectrum and sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Analytic {
    case: RegimeCase,
    spec: BiphotonSpectrum,
    sample: SampleResponse,
    guards: RegimeGuards,
    violations: Vec<GuardViolation>,
    m2_form: DispersiveM2Form,
}

impl Analytic {
    pub fn new(case: RegimeCase, spec: &BiphotonSpectrum, sample: &SampleResponse) -> Result<Self> {
        Self::with_thresholds(case, spec, sample, &GuardThresholds::default())
    }

    pub fn with_thresholds(
        case: RegimeCase,
        spec: &BiphotonSpectrum,
        sample: &SampleResponse,
        thresholds: &GuardThresholds,
    ) -> Result<Self> {
        case.check(spec, sample)?;
        let guards = RegimeGuards::evaluate(spec, sample);
        let violations = if case.is_simplified() {
            guards.violations(thresholds)
        } else {
            Vec::new()
        };
        Ok(Self {
            case,
            spec: *spec,
            sample: *sample,
            guards,
            violations,
            m2_form: DispersiveM2Form::Gaussian,
        })
    }

    pub fn with_m2_form(mut self, form: DispersiveM2Form) -> Self {
        self.m2_form = form;
        self
    }

    pub fn case(&self) -> RegimeCase {
        self.case
    }

    pub fn guards(&self) -> &RegimeGuards {
        &self.guards
    }

    /// Guard failures; always empty for exact cases.
    pub fn violations(&self) -> &[GuardViolation] {
        &self.violations
    }

    pub fn terms(&self, tau: f64) -> TermValues {
        let s = self.sample.delay() - tau;
        let r = self.sample.r();
        let big_r = r * r;
        let mc = (1.0 + big_r) * (1.0 + big_r);
        let (m0, m1, m2) = match self.case {
            RegimeCase::DegNoDisp | RegimeCase::NonDegNoDisp => self.no_dispersion(s, r),
            RegimeCase::DegDispExact | RegimeCase::NonDegDispExact => self.dispersive_exact(s, r),
            RegimeCase::DegDispSimplified | RegimeCase::NonDegDispSimplified => {
                self.dispersive_simplified(s, r)
            }
        };
        TermValues { mc, m0, m1, m2 }
    }

    fn no_dispersion(&self, s: f64, r: f64) -> (f64, f64, f64) {
        let big_r = r * r;
        let w0 = self.spec.omega0();
        let d = self.spec.delta();
        let dd = self.spec.big_delta();
        let om = self.spec.detuning();
        let dp2 = self.spec.delta_plus_sq();
        let m0 = 2.0 * big_r * (-s * s * dd * dd / 2.0).exp() * (2.0 * om * s).cos();
        let m1 = 4.0 * r * (1.0 + big_r) * (-dp2 * s * s / 8.0).exp() * (w0 * s).cos() * (om * s).cos();
        let m2 = 2.0 * big_r * (-s * s * d * d / 2.0).exp() * (2.0 * w0 * s).cos();
        (m0, m1, m2)
    }

    fn dispersive_exact(&self, s: f64, r: f64) -> (f64, f64, f64) {
        let big_r = r * r;
        let w0 = self.spec.omega0();
        let d = self.spec.delta();
        let dd = self.spec.big_delta();
        let om = self.spec.detuning();
        let k = self.sample.kappa();
        let dp2 = self.spec.delta_plus_sq();

        let q = d * d * dd * dd * k * k;
        let m0 = 2.0 * big_r / (1.0 + q).sqrt()
            * (-(4.0 * d * d * k * k * om * om + dd * dd * s * s) / (2.0 + 2.0 * q)).exp()
            * (2.0 * om * s / (1.0 + q)).cos();

        let big_d = dp2 * dp2 * k * k + 4.0;
        let half_arg = 0.5 * Complex64::new(2.0, -dp2 * k).arg();
        let base = w0 * s - dp2 * dp2 * k * s * s / (4.0 * big_d) + 4.0 * k * om * om / big_d
            - half_arg;
        let lobe = |sigma: f64| {
            let x = s + 2.0 * sigma * k * om;
            (-dp2 * x * x / (2.0 * big_d)).exp() * (base + sigma * 4.0 * om * s / big_d).cos()
        };
        let m1 = 2.0 * SQRT_2 * r * (1.0 + big_r) / big_d.sqrt().sqrt() * (lobe(1.0) + lobe(-1.0));

        let m2 = match self.m2_form {
            DispersiveM2Form::Gaussian => pump_term_gaussian(s, big_r, w0, d, dd, om, k),
            DispersiveM2Form::ErfAugmented => pump_term_erf(s, big_r, w0, d, dd, om, k),
        };
        (m0, m1, m2)
    }

    fn dispersive_simplified(&self, s: f64, r: f64) -> (f64, f64, f64) {
        let big_r = r * r;
        let w0 = self.spec.omega0();
        let d = self.spec.delta();
        let dd = self.spec.big_delta();
        let om = self.spec.detuning();
        let k = self.sample.kappa();
        let sk = dd * k.sqrt();

        let m0 = 2.0 * big_r * (-dd * dd * s * s / 2.0).exp() * (2.0 * om * s).cos();
        let phase = w0 * s - s * s / (4.0 * k) + FRAC_PI_4;
        let width2 = 2.0 * k * k * dd * dd;
        let (m1, m2) = if self.case == RegimeCase::DegDispSimplified {
            let m1 = 8.0 * r * (big_r + 1.0) / (dd * (2.0 * k).sqrt())
                * (-s * s / width2).exp()
                * phase.cos();
            let m2 = 2.0 * big_r / sk
                * (-d * d * s * s / 2.0).exp()
                * (2.0 * w0 * s - d.powi(4) * k * s * s / 2.0 + FRAC_PI_4).cos();
            (m1, m2)
        } else {
            let a = s + 2.0 * k * om;
            let b = s - 2.0 * k * om;
            let m1 = 2.0 * SQRT_2 * r * (1.0 + big_r) / sk
                * ((-a * a / width2).exp() + (-b * b / width2).exp())
                * phase.cos();
            let m2 = 2.0 * big_r / sk
                * (-2.0 * om * om / (dd * dd)).exp()
                * (-d * d * s * s / 2.0).exp()
                * (2.0 * w0 * s + FRAC_PI_4).cos();
            (m1, m2)
        };
        (m0, m1, m2)
    }

    /// One term (or `16·M` for [`KernelKind::Total`]) on a delay grid.
    pub fn term_series(&self, grid: &TauGrid, kind: KernelKind) -> Result<Interferogram> {
        let values = grid.taus().map(|t| self.terms(t).get(kind)).collect();
        let label = match kind {
            KernelKind::Constant => "Mc",
            KernelKind::Hom => "M0",
            KernelKind::SinglePhoton => "M1",
            KernelKind::Pump => "M2",
            KernelKind::Total => "16M",
        };
        Interferogram::new(grid.start, grid.step, values, label)
    }

    /// `M(τ)` on a delay grid, with the same sampling rule as the engine.
    pub fn interferogram(&self, grid: &TauGrid) -> Result<Interferogram> {
        check_sampling(grid.step, self.spec.omega0())?;
        let values = grid.taus().map(|t| self.terms(t).total()).collect();
        Interferogram::new(grid.start, grid.step, values, "M")
    }
}

fn pump_term_gaussian(s: f64, big_r: f64, w0: f64, d: f64, dd: f64, om: f64, k: f64) -> f64 {
    let a = Complex64::new(1.0, -k * d * d);
    let b = Complex64::new(1.0, -k * dd * dd);
    let expo = -(d * d * s * s) / (2.0 * a) + Complex64::new(0.0, 2.0 * k * om * om) / b
        + Complex64::new(0.0, 2.0 * w0 * s);
    2.0 * big_r * (expo.exp() / (a.sqrt() * b.sqrt())).re
}

fn pump_term_erf(s: f64, big_r: f64, w0: f64, d: f64, dd: f64, om: f64, k: f64) -> f64 {
    let i = Complex64::i();
    let d2 = d * d;
    let dd2 = dd * dd;
    let d4 = d2 * d2;
    let real_env = (-dd2 * k * k * om * om / (2.0 * dd2 * dd2 * k * k + 2.0)
        - d2 * s * s / (2.0 * d4 * k * k + 2.0))
        .exp();
    let phase = 2.0 * w0 * s - d4 * k * s * s / (2.0 * (d4 * k * k + 1.0))
        + 2.0 * k * om * om / (dd2 * dd2 * k * k + 1.0);
    let denom = ((-d2 * k - i) * (dd2 * k + i)).sqrt();
    let inner = ((1.0 - i * d2 * k) * (dd2 * k + i) / (d2 * (4.0 * dd2 * k + 2.0 * i) + 2.0 * i * dd2)).sqrt();
    let arg = inner * (2.0 * om + d2 * ((dd2 * k + i) * s - 2.0 * i * k * om))
        / ((d2 * k + i) * (dd2 * k + i));
    let bracket = 4.0 + 2.0 * faddeeva::erf(arg);
    big_r / 2.0 * real_env * (Complex64::from_polar(1.0, phase) / denom * bracket).re
}

/// Closed-form terms at one delay.
///
/// Guard failures of simplified cases are returned alongside the values.
pub fn terms(
    case: RegimeCase,
    tau: f64,
    spec: &BiphotonSpectrum,
    sample: &SampleResponse,
) -> Result<(TermValues, Vec<GuardViolation>)> {
    let a = Analytic::new(case, spec, sample)?;
    let t = a.terms(tau);
    Ok((t, a.violations))
}

/// Interferogram term labels used in spectral layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    M0,
    M1,
    M2,
}

/// Predicted position and standard deviation of one spectral peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub term: Term,
    pub center: f64,
    pub std: f64,
}

/// Positive-frequency peaks of `|M̃₀|`, `|M̃₁|`, `|M̃₂|`.
///
/// Widths are Gaussian standard deviations in rad/fs. Dispersion changes
/// phases, not magnitudes, except for the `√(1+δ²Δ²κ²)` stretch of `M₀`.
pub fn spectral_layout(
    case: RegimeCase,
    spec: &BiphotonSpectrum,
    sample: &SampleResponse,
) -> Result<Vec<SpectralPeak>> {
    case.check(spec, sample)?;
    let w0 = spec.omega0();
    let om = spec.detuning();
    let dd = spec.big_delta();
    let stretch = if case.is_dispersive() && !case.is_simplified() {
        1.0 + RegimeGuards::evaluate(spec, sample).dispersion_cancellation
    } else {
        1.0
    };
    let m1_std = spec.delta_plus_sq().sqrt() / 2.0;
    let mut out = Vec::with_capacity(4);
    out.push(SpectralPeak {
        term: Term::M0,
        center: 2.0 * om / stretch,
        std: dd / stretch.sqrt(),
    });
    if om == 0.0 {
        out.push(SpectralPeak {
            term: Term::M1,
            center: w0,
            std: m1_std,
        });
    } else {
        for c in [w0 - om, w0 + om] {
            out.push(SpectralPeak {
                term: Term::M1,
                center: c,
                std: m1_std,
            });
        }
    }
    out.push(SpectralPeak {
        term: Term::M2,
        center: 2.0 * w0,
        std: spec.delta(),
    });
    Ok(out)
}

/// Whether `M₀` can be isolated from `M₁` in frequency: `2Ω + Δ < ω_p/3`.
pub fn is_separable(spec: &BiphotonSpectrum) -> bool {
    2.0 * spec.detuning() + spec.big_delta() < 2.0 * spec.omega0() / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    const W0: f64 = 2.3;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn case1_at_zero_delay() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let r = 0.7f64;
        let h = SampleResponse::non_dispersive(r, 30.0, W0).unwrap();
        let (t, warn) = terms(RegimeCase::DegNoDisp, 30.0, &spec, &h).unwrap();
        let big_r = r * r;
        assert!(warn.is_empty());
        assert!(close(t.mc, (1.0 + big_r).powi(2), 1e-15));
        assert!(close(t.m0, 2.0 * big_r, 1e-15));
        assert!(close(t.m1, 4.0 * r * (1.0 + big_r), 1e-15));
        assert!(close(t.m2, 2.0 * big_r, 1e-15));
    }

    #[test]
    fn case_mismatch() {
        let nd = BiphotonSpectrum::new(W0, 0.01, 0.2, 0.1).unwrap();
        let deg = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let disp = SampleResponse::new(1.0, 0.0, 50.0, W0).unwrap();
        let flat = SampleResponse::non_dispersive(1.0, 0.0, W0).unwrap();
        assert!(matches!(
            Analytic::new(RegimeCase::DegNoDisp, &nd, &flat),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            Analytic::new(RegimeCase::DegNoDisp, &deg, &disp),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            Analytic::new(RegimeCase::DegDispSimplified, &deg, &flat),
            Err(Error::CaseMismatch(_))
        ));
        assert!(Analytic::new(RegimeCase::NonDegNoDisp, &deg, &flat).is_ok());
        assert!(Analytic::new(RegimeCase::DegDispExact, &deg, &flat).is_ok());
    }

    #[test]
    fn hom_width_grows_with_dispersion() {
        let dd = 0.2;
        let d = 0.01;
        let k = 1.0 / (d * dd);
        let spec = BiphotonSpectrum::degenerate(W0, d, dd).unwrap();
        let h = SampleResponse::new(1.0, 0.0, k, W0).unwrap();
        let a = Analytic::new(RegimeCase::DegDispExact, &spec, &h).unwrap();
        // e^{-1/2} point of the M₀ envelope sits at one StD.
        let sd = 2.0f64.sqrt() / dd;
        let ratio = a.terms(-sd).m0 / a.terms(0.0).m0;
        assert!(close(ratio, (-0.5f64).exp(), 1e-12));
    }

    #[test]
    fn out_of_regime_is_a_warning() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.05, 0.2).unwrap();
        let h = SampleResponse::new(1.0, 0.0, 50.0, W0).unwrap();
        let a = Analytic::new(RegimeCase::DegDispSimplified, &spec, &h).unwrap();
        assert_eq!(a.violations().len(), 3);
        assert!(a.terms(0.0).m0.is_finite());
    }

    #[test]
    fn thresholds_are_configurable() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.05, 0.2).unwrap();
        let h = SampleResponse::new(1.0, 0.0, 50.0, W0).unwrap();
        let th = GuardThresholds {
            max_dispersion_cancellation: 1.0,
            max_narrowband_pump: 1.0,
            min_dispersion_significance: 1.0,
        };
        let a = Analytic::with_thresholds(RegimeCase::DegDispSimplified, &spec, &h, &th).unwrap();
        assert!(a.violations().is_empty());
    }

    #[test]
    fn layout_case1_and_case2() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.001, 0.2).unwrap();
        let h = SampleResponse::non_dispersive(1.0, 0.0, W0).unwrap();
        let l = spectral_layout(RegimeCase::DegNoDisp, &spec, &h).unwrap();
        let m1 = l.iter().find(|p| p.term == Term::M1).unwrap();
        assert!(close(m1.center, W0, 0.0));
        assert!(close(m1.std, 0.1, 1e-5));

        let spec = BiphotonSpectrum::new(W0, 0.001, 0.2, 0.3).unwrap();
        let l = spectral_layout(RegimeCase::NonDegNoDisp, &spec, &h).unwrap();
        assert!(close(l[0].center, 0.6, 1e-15));
        let m1: Vec<_> = l.iter().filter(|p| p.term == Term::M1).map(|p| p.center).collect();
        assert_eq!(m1.len(), 2);
        assert!(close(m1[0], W0 - 0.3, 1e-15) && close(m1[1], W0 + 0.3, 1e-15));
    }

    #[test]
    fn separability() {
        assert!(is_separable(&BiphotonSpectrum::degenerate(W0, 0.001, 0.2).unwrap()));
        assert!(!is_separable(&BiphotonSpectrum::degenerate(W0, 0.001, 1.6).unwrap()));
        assert!(!is_separable(&BiphotonSpectrum::new(W0, 0.001, 0.2, 0.7).unwrap()));
    }

    #[test]
    fn case_numbers_round_trip() {
        for c in RegimeCase::ALL {
            assert_eq!(RegimeCase::from_number(c.number()), Some(c));
        }
        assert_eq!(RegimeCase::from_number(0), None);
        assert_eq!(RegimeCase::from_number(7), None);
    }

    #[test]
    fn erf_form_differs_from_gaussian_form() {
        // The alternative bracket adds R·Re{…erf(·)}, which is not small.
        let spec = BiphotonSpectrum::degenerate(W0, 0.05, 0.2).unwrap();
        let h = SampleResponse::new(1.0, 0.0, 20.0, W0).unwrap();
        let g = Analytic::new(RegimeCase::DegDispExact, &spec, &h).unwrap();
        let e = g.clone().with_m2_form(DispersiveM2Form::ErfAugmented);
        let gap = (5..40)
            .map(|i| (g.terms(i as f64).m2 - e.terms(i as f64).m2).abs())
            .fold(0.0, f64::max);
        assert!(gap > 1e-3);
    }
}
