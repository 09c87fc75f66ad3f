//! Brute-force evaluation of the coincidence interferogram.
//!
//! For a delay `τ` the detector sees
//!
//! ```text
//! 16·M(τ) = M_c + M₀(τ) − M₁(τ) + M₂(τ),   M_k = ∬ |f(ω₀+ν₁, ω₀+ν₂)|² K_k dν₁ dν₂
//! ```
//!
//! with the kernels of [`kernels`]. The double integral is computed by nested
//! adaptive Gauss–Kronrod quadrature in the rotated coordinates
//! `u = (ν₁+ν₂)/√2`, `v = (ν₁−ν₂)/√2`, where the Gaussian weight factorises.
//! All four terms and the density mass are integrated in one pass.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{ensure, Error, Result};
use crate::quadrature::{self, Axis, NestedLimits, Tolerance};
use crate::samples::{Response, SampleResponse};
use crate::spectra::BiphotonSpectrum;

/// Selects one kernel, or the signed combination `K_c + K₀ − K₁ + K₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `K_c`, the delay-independent background.
    Constant,
    /// `K₀`, two-photon (HOM) interference.
    Hom,
    /// `K₁`, single-photon interference.
    SinglePhoton,
    /// `K₂`, pump (two-photon Michelson) interference.
    Pump,
    Total,
}

impl KernelKind {
    pub const TERMS: [KernelKind; 4] = [
        KernelKind::Constant,
        KernelKind::Hom,
        KernelKind::SinglePhoton,
        KernelKind::Pump,
    ];

    fn pick(self, k: &[f64; 4]) -> f64 {
        match self {
            KernelKind::Constant => k[0],
            KernelKind::Hom => k[1],
            KernelKind::SinglePhoton => k[2],
            KernelKind::Pump => k[3],
            KernelKind::Total => k[0] + k[1] - k[2] + k[3],
        }
    }
}

/// `[K_c, K₀, K₁, K₂]` at detunings `ν₁, ν₂` from `ω₀` and delay `τ`.
pub fn kernels<H: Response + ?Sized>(nu1: f64, nu2: f64, tau: f64, h: &H, omega0: f64) -> [f64; 4] {
    // a_j = e^{-i(ω₀+ν_j)τ} H(ω₀+ν_j)
    let a1 = h.response_delayed(omega0 + nu1, tau);
    let a2 = h.response_delayed(omega0 + nu2, tau);
    let p1 = a1.norm_sqr() + 1.0;
    let p2 = a2.norm_sqr() + 1.0;
    [
        p1 * p2,
        2.0 * (a1.re * a2.re + a1.im * a2.im),
        2.0 * a1.re * p2 + 2.0 * a2.re * p1,
        2.0 * (a1.re * a2.re - a1.im * a2.im),
    ]
}

/// A single kernel value; see [`kernels`].
pub fn kernel<H: Response + ?Sized>(
    kind: KernelKind,
    nu1: f64,
    nu2: f64,
    tau: f64,
    h: &H,
    omega0: f64,
) -> f64 {
    kind.pick(&kernels(nu1, nu2, tau, h, omega0))
}

/// The four interferogram terms at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TermValues {
    pub mc: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl TermValues {
    /// `M(τ) = [M_c + M₀ − M₁ + M₂] / 16`.
    pub fn total(&self) -> f64 {
        (self.mc + self.m0 - self.m1 + self.m2) / 16.0
    }

    pub fn get(&self, kind: KernelKind) -> f64 {
        kind.pick(&[self.mc, self.m0, self.m1, self.m2])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mc, self.m0, self.m1, self.m2]
    }
}

/// Quadrature result with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEvaluation {
    pub values: TermValues,
    /// Integral of the density alone over the truncated support.
    pub mass: f64,
    pub error: [f64; 4],
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    /// Target error per term relative to the term's kernel bound.
    pub rel_tol: f64,
    pub limits: NestedLimits,
    /// Upper bound on the initial panel count per axis.
    pub max_initial_panels: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            limits: NestedLimits {
                max_outer_panels: 6000,
                max_inner_panels: 2000,
                inner_tightening: 0.1,
            },
            max_initial_panels: 3000,
        }
    }
}

fn panels_for(rate: f64, width: f64, cap: usize) -> usize {
    let n = (rate * width / (2.0 * PI)).ceil();
    if n.is_finite() {
        (n as usize + 1).min(cap)
    } else {
        cap
    }
}

/// All four terms at delay `tau`, plus diagnostics.
pub fn evaluate<H: Response + ?Sized>(
    tau: f64,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<TermEvaluation> {
    let omega0 = spec.omega0();
    let sup = spec.rotated_support();
    let (uh, vh) = (sup.u_half_width, sup.v_half_width);

    // Bounds on the kernel phase derivatives along each axis.
    let s = (tau - h.delay_hint()).abs();
    let k = h.chirp_hint().abs();
    let single = FRAC_1_SQRT_2 * s + k * (uh + vh);
    let rate_v = (SQRT_2 * s + 2.0 * k * uh).max(2.0 * k * vh).max(single);
    let rate_u = (SQRT_2 * s + 2.0 * k * uh).max(2.0 * k * vh).max(single);
    let mut outer = Axis::new(-vh, vh, 1).with_breakpoints(&[-sup.v_lobe, sup.v_lobe]);
    let segments = outer.breakpoints.len() - 1;
    outer.panels_per_segment = panels_for(rate_v, 2.0 * vh, opts.max_initial_panels)
        .div_ceil(segments)
        .max(2);
    let inner = Axis::new(
        -uh,
        uh,
        panels_for(rate_u, 2.0 * uh, opts.max_initial_panels).max(2),
    );

    let b = h.magnitude_bound();
    let b2 = b * b;
    let floor = 1e-12 * (b2 + 1.0) * (b2 + 1.0);
    let tol = Tolerance::<5> {
        rel_tol: opts.rel_tol,
        scales: [
            (b2 + 1.0) * (b2 + 1.0),
            (2.0 * b2).max(floor),
            (4.0 * b * (b2 + 1.0)).max(floor),
            (2.0 * b2).max(floor),
            1.0,
        ],
        mass_index: Some(4),
        abs_floor: 0.0,
    };

    let r = quadrature::integrate_2d(
        |v, u| {
            let nu1 = (u + v) * FRAC_1_SQRT_2;
            let nu2 = (u - v) * FRAC_1_SQRT_2;
            let w = spec.density(omega0 + nu1, omega0 + nu2);
            if w == 0.0 {
                return [0.0; 5];
            }
            let kk = kernels(nu1, nu2, tau, h, omega0);
            [w * kk[0], w * kk[1], w * kk[2], w * kk[3], w]
        },
        &outer,
        &inner,
        &tol,
        opts.limits,
    )
    .into_result(&tol)?;

    let v = r.value;
    Ok(TermEvaluation {
        values: TermValues {
            mc: v[0],
            m0: v[1],
            m1: v[2],
            m2: v[3],
        },
        mass: v[4],
        error: [r.error[0], r.error[1], r.error[2], r.error[3]],
        evaluations: r.evaluations,
    })
}

/// All four terms at delay `tau`.
pub fn terms<H: Response + ?Sized>(
    tau: f64,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<TermValues> {
    evaluate(tau, spec, h, opts).map(|e| e.values)
}

/// One term (or the signed total `16·M`) at delay `tau`.
pub fn term<H: Response + ?Sized>(
    kind: KernelKind,
    tau: f64,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<f64> {
    terms(tau, spec, h, opts).map(|t| t.get(kind))
}

/// Uniformly sampled real signal on a delay axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    tau_start: f64,
    tau_step: f64,
    values: Vec<f64>,
    pub label: String,
}

impl Interferogram {
    pub fn new(tau_start: f64, tau_step: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        ensure(
            tau_step > 0.0 && tau_step.is_finite(),
            "tau_step",
            tau_step,
            "> 0",
        )?;
        ensure(tau_start.is_finite(), "tau_start", tau_start, "finite")?;
        if values.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "values",
                value: *bad,
                constraint: "finite",
            });
        }
        Ok(Self {
            tau_start,
            tau_step,
            values,
            label: label.into(),
        })
    }

    pub fn tau_start(&self) -> f64 {
        self.tau_start
    }

    pub fn tau_step(&self) -> f64 {
        self.tau_step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau_start + self.tau_step * i as f64
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.tau(i))
    }

    pub fn grid(&self) -> TauGrid {
        TauGrid {
            start: self.tau_start,
            step: self.tau_step,
            len: self.values.len(),
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// A uniform delay grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TauGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        ensure(step > 0.0 && step.is_finite(), "tau_step", step, "> 0")?;
        ensure(start.is_finite(), "tau_start", start, "finite")?;
        if len == 0 {
            return Err(Error::TooShort { len, min: 1 });
        }
        Ok(Self { start, step, len })
    }

    /// `len` points centred on `center`.
    pub fn centered(center: f64, step: f64, len: usize) -> Result<Self> {
        let start = center - step * (len as f64 - 1.0) / 2.0;
        Self::new(start, step, len)
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.tau(i))
    }
}

/// Largest delay step that keeps eight samples per `M₂` fringe (`π/ω₀`).
pub fn max_tau_step(omega0: f64) -> f64 {
    PI / (8.0 * omega0)
}

pub fn check_sampling(tau_step: f64, omega0: f64) -> Result<()> {
    let max_step = max_tau_step(omega0);
    if tau_step > max_step * (1.0 + 1e-12) {
        Err(Error::NyquistViolation { tau_step, max_step })
    } else {
        Ok(())
    }
}

/// Default delay grid for a single-layer sample: centred on `T`, half-width
/// `6·max(1/Δ, κΔ, 2κΩ)`, step `π/(8ω₀)`.
pub fn default_grid(spec: &BiphotonSpectrum, sample: &SampleResponse) -> TauGrid {
    let k = sample.kappa().abs();
    let d = spec.big_delta();
    let half = 6.0 * (1.0 / d).max(k * d).max(2.0 * k * spec.detuning());
    let step = max_tau_step(spec.omega0());
    let n_half = (half / step).ceil() as usize;
    TauGrid {
        start: sample.delay() - step * n_half as f64,
        step,
        len: 2 * n_half + 1,
    }
}

/// `M(τ)` on every grid point, evaluated sequentially.
pub fn interferogram<H: Response + ?Sized>(
    grid: &TauGrid,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<Interferogram> {
    check_sampling(grid.step, spec.omega0())?;
    let values = grid
        .taus()
        .map(|tau| terms(tau, spec, h, opts).map(|t| t.total()))
        .collect::<Result<Vec<_>>>()?;
    Interferogram::new(grid.start, grid.step, values, "M")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const W0: f64 = 2.3;

    fn opts() -> EngineOptions {
        EngineOptions::default()
    }

    #[test]
    fn constant_kernel_for_unit_reflector() {
        let h = SampleResponse::non_dispersive(1.0, 3.0, W0).unwrap();
        for (a, b, t) in [(0.1, -0.2, 5.0), (0.0, 0.0, 0.0), (0.7, 0.3, -40.0)] {
            assert!((kernel(KernelKind::Constant, a, b, t, &h, W0) - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hom_kernel_on_diagonal() {
        let r: f64 = 0.6;
        let h = SampleResponse::non_dispersive(r, 0.0, W0).unwrap();
        for nu in [-0.3, 0.0, 0.25] {
            let k0 = kernel(KernelKind::Hom, nu, nu, 17.0, &h, W0);
            assert!((k0 - 2.0 * r * r).abs() < 1e-14);
        }
    }

    #[test]
    fn kernel_sum_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = SampleResponse::new(0.8, 12.0, 40.0, W0).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let nu1 = rng.gen_range(-1.0..1.0);
            let nu2 = rng.gen_range(-1.0..1.0);
            let tau = rng.gen_range(-50.0..50.0);
            let e1 = Complex64::from_polar(1.0, (W0 + nu1) * tau);
            let e2 = Complex64::from_polar(1.0, (W0 + nu2) * tau);
            let direct = ((h.response(W0 + nu1) - e1) * (h.response(W0 + nu2) - e2)).norm_sqr();
            let sum = kernel(KernelKind::Total, nu1, nu2, tau, &h, W0);
            worst = worst.max((sum - direct).abs());
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn zero_reflectivity() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let h = SampleResponse::non_dispersive(0.0, 0.0, W0).unwrap();
        for tau in [0.0, 3.0, -12.0] {
            let t = terms(tau, &spec, &h, &opts()).unwrap();
            assert!((t.mc - 1.0).abs() < 1e-8);
            assert_eq!((t.m0, t.m1, t.m2), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn hom_term_matches_gaussian_width() {
        let (d, dd, r) = (0.01, 0.2, 0.7f64);
        let spec = BiphotonSpectrum::degenerate(W0, d, dd).unwrap();
        let h = SampleResponse::non_dispersive(r, 5.0, W0).unwrap();
        let big_r = r * r;
        for tau in [5.0, 0.0, 12.0, -3.0] {
            let m0 = term(KernelKind::Hom, tau, &spec, &h, &opts()).unwrap();
            let s = 5.0 - tau;
            let exact = 2.0 * big_r * (-(dd * dd) * s * s / 2.0).exp();
            assert!((m0 - exact).abs() < 1e-6 * exact.max(1e-3), "{tau}: {m0} vs {exact}");
        }
    }

    #[test]
    fn zero_delay_balance() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let h = SampleResponse::non_dispersive(1.0, 4.0, W0).unwrap();
        let t = terms(4.0, &spec, &h, &opts()).unwrap();
        assert!(t.total().abs() < 1e-8, "{:?}", t);
    }

    #[test]
    fn far_from_sample_only_background_survives() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.05, 0.2).unwrap();
        let h = SampleResponse::non_dispersive(1.0, 0.0, W0).unwrap();
        let tau = 20.0 / 0.05;
        let t = terms(tau, &spec, &h, &opts()).unwrap();
        assert!((t.total() - t.mc / 16.0).abs() < 1e-9 * t.mc);
        assert!((t.total() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn nyquist_violation() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let h = SampleResponse::non_dispersive(1.0, 0.0, W0).unwrap();
        let grid = TauGrid::new(0.0, 1.1 * max_tau_step(W0), 4).unwrap();
        assert!(matches!(
            interferogram(&grid, &spec, &h, &opts()),
            Err(Error::NyquistViolation { .. })
        ));
    }

    #[test]
    fn default_grid_shape() {
        let spec = BiphotonSpectrum::degenerate(W0, 0.01, 0.2).unwrap();
        let h = SampleResponse::new(1.0, 50.0, 0.0, W0).unwrap();
        let g = default_grid(&spec, &h);
        assert_eq!(g.len % 2, 1);
        assert!((g.tau(g.len / 2) - 50.0).abs() < 1e-9);
        assert!(g.tau(g.len - 1) - 50.0 >= 30.0);
        assert!((g.step - max_tau_step(W0)).abs() < 1e-15);
    }

    #[test]
    fn interferogram_rejects_non_finite() {
        assert!(Interferogram::new(0.0, 1.0, alloc::vec![1.0, f64::NAN], "x").is_err());
        assert!(Interferogram::new(0.0, 0.0, alloc::vec![1.0], "x").is_err());
        assert!(Interferogram::new(0.0, 1.0, alloc::vec![], "x").is_err());
    }
}
