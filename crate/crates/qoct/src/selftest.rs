//! Acceptance suite. Each criterion returns an [`Outcome`] with one line per
//! check; `qoct selftest` and the `acceptance` test target both run these.

use std::fmt;
use std::time::{Duration, Instant};

use qoct_core::analytic::{spectral_layout, Analytic, RegimeCase, Term};
use qoct_core::dsp::{
    axial_resolution, broadening_correction, fit_gaussian, EfficiencyCurve, FitOptions,
    GaussianPeakFit, ZoneConfig,
};
use qoct_core::engine::{
    self, default_grid, kernel, EngineOptions, Interferogram, KernelKind, TauGrid, TermValues,
};
use qoct_core::samples::{Response, SampleResponse};
use qoct_core::source::{
    bandwidth_from_waist, estimate_generated_rate, fwhm_from_integral,
    spectral_coincidence_efficiency,
};
use qoct_core::spectra::BiphotonSpectrum;
use qoct_core::units::{thz_to_rad_per_fs, wavelength_nm_to_omega};
use qoct_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fft::{self, FftOptions};
use crate::par;
use crate::pipeline::{self, AnalysisInput, AnalysisOutput};

/// Centre frequency of the 810 nm degenerate pair, rad/fs.
fn omega_810() -> f64 {
    wavelength_nm_to_omega(810.0)
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Outcome {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            detail: detail.into(),
            passed,
        });
    }

    /// `value < limit`, reported in scientific notation.
    fn below(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.check(name, value < limit, format!("{value:.3e} < {limit:.0e}"));
    }

    /// `|value − target| ≤ tol`.
    fn near(&mut self, name: impl Into<String>, value: f64, target: f64, tol: f64) {
        self.check(
            name,
            (value - target).abs() <= tol,
            format!("{value:.6} vs {target:.6} ± {tol:.3e}"),
        );
    }

    /// `|value/target − 1| ≤ rel`.
    fn rel(&mut self, name: impl Into<String>, value: f64, target: f64, rel: f64) {
        let e = (value / target - 1.0).abs();
        self.check(
            name,
            e <= rel,
            format!("{value:.6} vs {target:.6}, rel. error {e:.2e} <= {rel}"),
        );
    }

    fn fail(&mut self, name: impl Into<String>, err: impl fmt::Display) {
        self.check(name, false, format!("error: {err}"));
    }

    /// The single pass/fail line.
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} - {} ({}/{} checks, {:.1} s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.line())?;
        for c in &self.checks {
            writeln!(
                f,
                "    [{}] {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn timed(id: u8, title: &'static str, body: impl FnOnce(&mut Outcome)) -> Outcome {
    let start = Instant::now();
    let mut o = Outcome::new(id, title);
    body(&mut o);
    o.elapsed = start.elapsed();
    o
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

pub fn by_id(id: u8) -> Option<Outcome> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        _ => return None,
    })
}

// ------------------------------------------------------------ fixtures

/// Random inputs for an exact regime case.
pub fn random_inputs(case: RegimeCase, rng: &mut ChaCha8Rng) -> (BiphotonSpectrum, SampleResponse) {
    let w0 = rng.gen_range(1.8..2.6);
    let dd = rng.gen_range(0.25..0.5);
    let dispersive = case.is_dispersive();
    let ratio = if dispersive { 0.2 } else { 0.05 };
    let d = dd * rng.gen_range(0.005..ratio);
    let om = if case.is_degenerate() {
        0.0
    } else {
        dd * rng.gen_range(0.3..1.0)
    };
    let kappa = if dispersive {
        rng.gen_range(0.5..3.0) / (dd * dd)
    } else {
        0.0
    };
    let r = rng.gen_range(0.3..1.0);
    let t = rng.gen_range(-50.0..50.0);
    (
        BiphotonSpectrum::new(w0, d, dd, om).unwrap(),
        SampleResponse::new(r, t, kappa, w0).unwrap(),
    )
}

/// Grid centred on `T` at the sampling limit.
fn fixture_grid(sample: &SampleResponse, omega0: f64, len: usize) -> TauGrid {
    TauGrid::centered(sample.delay(), engine::max_tau_step(omega0), len).unwrap()
}

/// Zones for a 405 nm pump with a 1000 nm dichroic cut-on.
fn fixture_zones() -> ZoneConfig {
    ZoneConfig::new(2.0 * omega_810(), omega_810() - wavelength_nm_to_omega(1000.0)).unwrap()
}

fn unit_curve() -> EfficiencyCurve {
    EfficiencyCurve::constant(1.0, 0.0, 4.0 * omega_810()).unwrap()
}

/// Smooth, tabulated detector efficiencies (every 5 nm).
pub fn smooth_curves() -> (EfficiencyCurve, EfficiencyCurve) {
    let table = |lo: usize, hi: usize, f: &dyn Fn(f64) -> f64| {
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .step_by(5)
            .map(|l| (l as f64, f(l as f64)))
            .collect();
        EfficiencyCurve::from_wavelengths(&pts).unwrap()
    };
    let vis = table(380, 1020, &|l| {
        let x = (l - 650.0) / 350.0;
        0.05 + 0.65 * (-x * x).exp()
    });
    let ir = table(980, 1700, &|l| {
        let x = (l - 1300.0) / 400.0;
        0.8 - 0.3 * x * x
    });
    (vis, ir)
}

/// `M(τ)` from the closed form of `case`.
fn analytic_interferogram(case: RegimeCase, spec: &BiphotonSpectrum, sample: &SampleResponse, grid: &TauGrid) -> Interferogram {
    Analytic::new(case, spec, sample)
        .unwrap()
        .interferogram(grid)
        .unwrap()
}

/// Degrades `truth` with the given curves and runs the analysis.
fn round_trip(truth: &Interferogram, vis: &EfficiencyCurve, ir: &EfficiencyCurve, fft: FftOptions) -> crate::AppResult<AnalysisOutput> {
    let zones = fixture_zones();
    let (vv, iv) = pipeline::degrade(truth, vis, ir, &zones)?;
    pipeline::analyze_data(&AnalysisInput {
        vis_vis: &vv,
        ir_vis: &iv,
        eta_vis: vis,
        eta_ir: ir,
        zones: &zones,
        fft,
        pump_peak_fwhm: 0.0,
    })
}

fn term_of(out: &AnalysisOutput, term: Term) -> &pipeline::TermOutput {
    out.terms.iter().find(|t| t.term == term).unwrap()
}

/// Gaussian fit restricted to `[lo, hi]`.
fn fit_window(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> qoct_core::Result<GaussianPeakFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(x, y)| (*x, *y))
        .unzip();
    fit_gaussian(&x, &y, &FitOptions::default())
}

// ------------------------------------------------------------ criteria

/// Engine quadrature against the exact closed forms on the default grid.
pub fn criterion_1() -> Outcome {
    timed(1, "oracle vs exact closed forms, 10 random sets per exact case", |o| {
        let opts = EngineOptions::default();
        let exact = [
            RegimeCase::DegNoDisp,
            RegimeCase::NonDegNoDisp,
            RegimeCase::DegDispExact,
            RegimeCase::NonDegDispExact,
        ];
        let start = Instant::now();
        for case in exact {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + case.number() as u64);
            let limit = if case.is_dispersive() { 1e-5 } else { 1e-6 };
            let mut worst = 0.0f64;
            let mut points = 0;
            let mut error = None;
            for _ in 0..10 {
                let (spec, sample) = random_inputs(case, &mut rng);
                let grid = default_grid(&spec, &sample);
                points += grid.len;
                let oracle = match par::terms(&grid, &spec, &sample, &opts) {
                    Ok(v) => v,
                    Err(e) => {
                        error = Some(e);
                        break;
                    }
                };
                let a = Analytic::new(case, &spec, &sample).unwrap();
                let closed: Vec<TermValues> = grid.taus().map(|t| a.terms(t)).collect();
                let d = pipeline::deviation(&oracle, &closed);
                worst = worst.max(d.mc).max(d.m0).max(d.m1).max(d.m2).max(d.total);
            }
            let name = format!("case {} sup-norm rel. error ({points} points)", case.number());
            match error {
                Some(e) => o.fail(name, e),
                None => o.below(name, worst, limit),
            }
        }
        let secs = start.elapsed().as_secs_f64();
        o.check("runtime", secs < 300.0, format!("{secs:.1} s < 300 s"));
    })
}

/// `K_c + K₀ − K₁ + K₂` against `|(H₁ − e₁)(H₂ − e₂)|²`.
pub fn criterion_2() -> Outcome {
    timed(2, "kernel identity at 1e4 random points", |o| {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let w0 = rng.gen_range(1.5..3.0);
            let h = SampleResponse::new(
                rng.gen_range(0.0..1.0),
                rng.gen_range(-100.0..100.0),
                rng.gen_range(-500.0..500.0),
                w0,
            )
            .unwrap();
            let nu1 = rng.gen_range(-1.0..1.0);
            let nu2 = rng.gen_range(-1.0..1.0);
            let tau = rng.gen_range(-200.0..200.0);
            let e = |nu: f64| Complex64::from_polar(1.0, (w0 + nu) * tau);
            let direct =
                ((h.response(w0 + nu1) - e(nu1)) * (h.response(w0 + nu2) - e(nu2))).norm_sqr();
            let sum = kernel(KernelKind::Total, nu1, nu2, tau, &h, w0);
            worst = worst.max((sum - direct).abs());
        }
        o.below("max abs error", worst, 1e-12);
    })
}

/// Fitted FWHM of extracted `M₀` against the `M₁` envelope, case 1.
pub fn criterion_3() -> Outcome {
    timed(3, "resolution factor two (case 1)", |o| {
        let w0 = omega_810();
        let spec = BiphotonSpectrum::degenerate(w0, 0.03, 0.3).unwrap();
        let sample = SampleResponse::non_dispersive(1.0, 0.0, w0).unwrap();
        let grid = fixture_grid(&sample, w0, 2048);
        let truth = analytic_interferogram(RegimeCase::DegNoDisp, &spec, &sample, &grid);
        let curve = unit_curve();
        match round_trip(&truth, &curve, &curve, FftOptions::default()) {
            Ok(out) => {
                let m0 = term_of(&out, Term::M0);
                let m1 = term_of(&out, Term::M1);
                o.check(
                    "M0 fitted directly, M1 through its envelope",
                    !m0.envelope_fitted && m1.envelope_fitted,
                    format!("M0 {}, M1 {}", m0.envelope_fitted, m1.envelope_fitted),
                );
                o.rel("FWHM(M0) / FWHM(M1 envelope)", m0.fit.fwhm() / m1.fit.fwhm(), 0.5, 0.03);
            }
            Err(e) => o.fail("pipeline", e),
        }
    })
}

/// Dispersion cancellation of `M₀` and the `√(1+δ²Δ²κ²)` broadening.
pub fn criterion_4() -> Outcome {
    timed(4, "dispersion cancellation (case 3)", |o| {
        let w0 = omega_810();
        let dd = 0.3;
        let kappa = 50.0 / (dd * dd);
        let d = 0.01 / (dd * kappa);
        let spec = BiphotonSpectrum::degenerate(w0, d, dd).unwrap();
        let disp = SampleResponse::new(1.0, 0.0, kappa, w0).unwrap();
        let flat = disp.with_kappa(0.0).unwrap();
        let grid = default_grid(&spec, &disp);
        let curve = unit_curve();
        let runs = [
            (RegimeCase::DegDispExact, &disp),
            (RegimeCase::DegNoDisp, &flat),
        ]
        .map(|(case, s)| round_trip(&analytic_interferogram(case, &spec, s, &grid), &curve, &curve, FftOptions::default()));
        match runs {
            [Ok(a), Ok(b)] => {
                let w = |out: &AnalysisOutput, t| term_of(out, t).fit.fwhm();
                o.rel("M0 FWHM vs kappa = 0", w(&a, Term::M0), w(&b, Term::M0), 0.05);
                let ratio = w(&a, Term::M1) / w(&b, Term::M1);
                o.check("M1 envelope FWHM ratio", ratio >= 10.0, format!("{ratio:.2} >= 10"));
            }
            [a, b] => {
                for r in [a, b] {
                    if let Err(e) = r {
                        o.fail("pipeline", e);
                    }
                }
            }
        }

        // Engine M₀ at δΔκ ∈ {0.5, 1, 2}, fitted, against √(1+q)/Δ.
        let kappa = 20.0;
        let opts = EngineOptions::default();
        for x in [0.5, 1.0, 2.0] {
            let d = x / (dd * kappa);
            let spec = BiphotonSpectrum::degenerate(w0, d, dd).unwrap();
            let sample = SampleResponse::new(1.0, 0.0, kappa, w0).unwrap();
            let sigma = (1.0f64 + x * x).sqrt() / dd;
            let taus: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 0.2 * sigma).collect();
            let m0: qoct_core::Result<Vec<f64>> = taus
                .par_iter()
                .map(|&t| engine::term(KernelKind::Hom, t, &spec, &sample, &opts))
                .collect();
            let fit = m0.and_then(|m| fit_gaussian(&taus, &m, &FitOptions::default()));
            match fit {
                Ok(f) => o.rel(format!("engine M0 StD at delta*Delta*kappa = {x}"), f.std, sigma, 0.02),
                Err(e) => o.fail(format!("engine M0 at delta*Delta*kappa = {x}"), e),
            }
        }
    })
}

/// Formula-level regressions against the quoted figures.
pub fn criterion_5() -> Outcome {
    timed(5, "reference-number regressions", |o| {
        let thz = thz_to_rad_per_fs;
        match broadening_correction(thz(136.0), 0.18 * thz(740.2)) {
            Ok(v) => o.near("corrected FWHM [THz]", v / thz(1.0), 132.0, 1.0),
            Err(e) => o.fail("corrected FWHM", e),
        }
        match axial_resolution(thz(132.0)) {
            Ok(v) => o.near("axial resolution at 132 THz [um]", v, 0.50, 0.01),
            Err(e) => o.fail("axial resolution", e),
        }
        match bandwidth_from_waist(5.7) {
            Ok(b) => o.near("FWHM at W = 5.7 um [THz]", fwhm_from_integral(b) / thz(1.0), 117.0, 1.0),
            Err(e) => o.fail("bandwidth from waist", e),
        }
        match spectral_coincidence_efficiency(2700.0, 141.0) {
            Ok(v) => {
                o.near("S0/P [cps/(THz mW)]", v, 19.1, 0.1);
                o.check("rounds to about 20", (v / 10.0).round() == 2.0, format!("{v:.2}"));
            }
            Err(e) => o.fail("S0/P", e),
        }
        let omega_p = 2.0 * omega_810();
        let unit = EfficiencyCurve::constant(1.0, 0.0, omega_p).unwrap();
        let p = qoct_core::source::SourceParams::reference_bbo();
        let rate = pipeline::synthetic_m1_spectrum(&p, bandwidth_from_waist(p.waist).unwrap())
            .map_err(|e| e.to_string())
            .and_then(|m1| {
                estimate_generated_rate(&m1, &unit, omega_p, 375.0, 1.0).map_err(|e| e.to_string())
            });
        match rate {
            Ok(v) => o.check("unit-efficiency generated rate [cps/mW]", v == 750.0, format!("{v} == 750")),
            Err(e) => o.fail("unit-efficiency generated rate", e),
        }
    })
}

/// Forward degradation with smooth curves, then the full analysis.
pub fn criterion_6() -> Outcome {
    timed(6, "pipeline round trip with smooth efficiencies", |o| {
        let w0 = omega_810();
        let dd = 0.3;
        let spec = BiphotonSpectrum::degenerate(w0, 0.03, dd).unwrap();
        let sample = SampleResponse::non_dispersive(0.9, 0.0, w0).unwrap();
        let grid = fixture_grid(&sample, w0, 2048);
        let truth = analytic_interferogram(RegimeCase::DegNoDisp, &spec, &sample, &grid);
        let (vis, ir) = smooth_curves();
        match round_trip(&truth, &vis, &ir, FftOptions::default()) {
            Ok(out) => {
                let m0 = term_of(&out, Term::M0);
                let fwhm = (8.0 * std::f64::consts::LN_2).sqrt() / dd;
                o.rel("recovered M0 FWHM [fs]", m0.fit.fwhm(), fwhm, 0.02);
            }
            Err(e) => o.fail("pipeline", e),
        }

        // Degradation acts on the unpadded DFT, so the in-zone comparison is
        // made on the same bins.
        let unpadded = FftOptions { zero_pad: 1, ..FftOptions::default() };
        match round_trip(&truth, &vis, &ir, unpadded) {
            Ok(out) => {
                let t = fft::fft_spectrum(&truth, &unpadded).unwrap();
                for term in [Term::M0, Term::M1] {
                    let s = &term_of(&out, term).spectrum;
                    let (mut num, mut den) = (0.0, 0.0);
                    for k in 0..s.len() {
                        if s.values()[k] != Complex64::new(0.0, 0.0) {
                            num += (s.values()[k] - t.values()[k]).norm_sqr();
                            den += t.values()[k].norm_sqr();
                        }
                    }
                    o.below(format!("{term:?} in-zone relative RMS"), (num / den).sqrt(), 5e-3);
                }
            }
            Err(e) => o.fail("pipeline", e),
        }

        for pad in [1, 4] {
            let s = fft::fft_spectrum(&truth, &FftOptions { zero_pad: pad, ..FftOptions::default() }).unwrap();
            let mean = truth.values().iter().sum::<f64>() / truth.len() as f64;
            let centered: Vec<f64> = truth.values().iter().map(|v| v - mean).collect();
            let e_t: f64 = centered.iter().map(|v| v * v).sum();
            let e_f: f64 = s.values().iter().map(|v| v.norm_sqr()).sum();
            o.below(
                format!("Parseval rel. error (zero-pad {pad})"),
                (e_f / (s.len() as f64 * e_t) - 1.0).abs(),
                1e-10,
            );
            let back = fft::extract_term(&s).unwrap();
            let rms = (back
                .values()
                .iter()
                .zip(&centered)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / centered.len() as f64)
                .sqrt();
            o.below(format!("inverse-FFT RMS (zero-pad {pad})"), rms, 1e-10);
        }
    })
}

/// Peak positions of the non-degenerate spectra and the case-6 lobes.
pub fn criterion_7() -> Outcome {
    timed(7, "non-degenerate layout", |o| {
        let w0 = omega_810();
        let (dd, om) = (0.2, 0.5);
        let spec = BiphotonSpectrum::new(w0, 0.002, dd, om).unwrap();
        let sample = SampleResponse::non_dispersive(1.0, 0.0, w0).unwrap();
        let grid = fixture_grid(&sample, w0, 4096);
        let ig = analytic_interferogram(RegimeCase::NonDegNoDisp, &spec, &sample, &grid);
        let s = fft::fft_spectrum(&ig, &FftOptions::default()).unwrap();
        let (ws, mag) = s.magnitude();
        let bin = s.omega_step();
        let layout = spectral_layout(RegimeCase::NonDegNoDisp, &spec, &sample).unwrap();
        for (peak, want) in [
            (Term::M0, 2.0 * om),
            (Term::M1, w0 - om),
            (Term::M1, w0 + om),
        ] {
            let p = layout
                .iter()
                .find(|p| p.term == peak && (p.center - want).abs() < 1e-12)
                .copied();
            let name = format!("{peak:?} peak at {want:.4} rad/fs");
            let Some(p) = p else {
                o.fail(name, "not in the predicted layout");
                continue;
            };
            match fit_window(&ws, &mag, p.center - 2.0 * p.std, p.center + 2.0 * p.std) {
                Ok(f) => o.check(
                    name,
                    (f.center - want).abs() < bin,
                    format!("fitted {:.5}, offset {:.2e} < bin {bin:.2e}", f.center, (f.center - want).abs()),
                ),
                Err(e) => o.fail(name, e),
            }
        }

        // Case 6: lobes of the M₁ envelope at T ± 2κΩ.
        let (dd, om, kappa, t) = (0.2, 0.4, 2500.0, 100.0);
        let spec = BiphotonSpectrum::new(w0, 1e-5, dd, om).unwrap();
        let sample = SampleResponse::new(1.0, t, kappa, w0).unwrap();
        let grid = default_grid(&spec, &sample);
        let a = Analytic::new(RegimeCase::NonDegDispSimplified, &spec, &sample).unwrap();
        o.check(
            "case-6 guards hold",
            a.violations().is_empty(),
            format!("{} violations", a.violations().len()),
        );
        let m1 = a.term_series(&grid, KernelKind::SinglePhoton).unwrap();
        let env = fft::envelope(&m1).unwrap();
        let taus: Vec<f64> = env.taus().collect();
        let shift = 2.0 * kappa * om;
        for sign in [-1.0, 1.0] {
            let want = t + sign * shift;
            let name = format!("lobe at T {} 2 kappa Omega", if sign < 0.0 { "-" } else { "+" });
            match fit_window(&taus, env.values(), want - shift, want + shift) {
                Ok(f) => {
                    let e = (f.center - want).abs() / shift;
                    o.check(name, e <= 0.02, format!("fitted {:.2} fs vs {want:.2} fs, {e:.2e} of 2 kappa Omega <= 0.02", f.center));
                }
                Err(e) => o.fail(name, e),
            }
        }
    })
}

/// Normalization of the density and the Ω → 0, κ → 0 limits.
pub fn criterion_8() -> Outcome {
    timed(8, "normalization and limits", |o| {
        let w0 = omega_810();
        for (d, dd, om) in [(0.01, 0.3, 0.0), (0.002, 0.2, 0.5), (0.2, 0.2, 0.1), (1e-4, 0.4, 1.2)] {
            let spec = BiphotonSpectrum::new(w0, d, dd, om).unwrap();
            match spec.normalization() {
                Ok(n) => o.below(format!("|norm - 1| at delta={d}, Delta={dd}, Omega={om}"), (n - 1.0).abs(), 1e-6),
                Err(e) => o.fail("normalization", e),
            }
        }

        let deg = BiphotonSpectrum::degenerate(w0, 0.01, 0.3).unwrap();
        let nondeg = BiphotonSpectrum::new(w0, 0.01, 0.3, 0.0).unwrap();
        let mut dens = 0.0f64;
        for i in 0..41 {
            for j in 0..41 {
                let (a, b) = (w0 + 0.03 * (i as f64 - 20.0), w0 + 0.001 * (j as f64 - 20.0));
                dens = dens.max((deg.density(a, b) - nondeg.density(a, b)).abs() / deg.density(w0, w0));
            }
        }
        o.below("density, Omega = 0 vs degenerate", dens, 1e-15);

        let flat = SampleResponse::non_dispersive(0.8, 7.0, w0).unwrap();
        let disp = SampleResponse::new(0.8, 7.0, 0.0, w0).unwrap();
        let simplified = SampleResponse::new(0.8, 7.0, 400.0, w0).unwrap();
        // Case 6 omits the δ⁴κs²/2 chirp that case 4 keeps in M₂, so only
        // Mc, M₀ and M₁ are compared for that pair.
        let all = [0, 1, 2, 3];
        let pairs: [(&str, RegimeCase, &SampleResponse, RegimeCase, &SampleResponse, &[usize]); 4] = [
            ("case 2 at Omega = 0 vs case 1", RegimeCase::NonDegNoDisp, &flat, RegimeCase::DegNoDisp, &flat, &all),
            ("case 5 at Omega = 0 vs case 3", RegimeCase::NonDegDispExact, &simplified, RegimeCase::DegDispExact, &simplified, &all),
            ("case 3 at kappa = 0 vs case 1", RegimeCase::DegDispExact, &disp, RegimeCase::DegNoDisp, &flat, &all),
            ("case 6 at Omega = 0 vs case 4 (Mc, M0, M1)", RegimeCase::NonDegDispSimplified, &simplified, RegimeCase::DegDispSimplified, &simplified, &all[..3]),
        ];
        for (name, ca, sa, cb, sb, which) in pairs {
            let (Ok(a), Ok(b)) = (Analytic::new(ca, &nondeg, sa), Analytic::new(cb, &deg, sb)) else {
                o.fail(name, "case rejected its inputs");
                continue;
            };
            let mut worst = 0.0f64;
            for i in 0..401 {
                let tau = 7.0 + (i as f64 - 200.0) * 0.37;
                let (x, y) = (a.terms(tau).as_array(), b.terms(tau).as_array());
                // Relative to the kernel bound of each term.
                let r = 0.8f64;
                let scale = [(r * r + 1.0).powi(2), 2.0 * r * r, 4.0 * r * (r * r + 1.0), 2.0 * r * r];
                for &k in which {
                    worst = worst.max((x[k] - y[k]).abs() / scale[k]);
                }
            }
            o.below(name, worst, 1e-14);
        }
        let dispersive_5 = SampleResponse::new(0.8, 7.0, 0.0, w0).unwrap();
        let spec2 = BiphotonSpectrum::new(w0, 0.01, 0.3, 0.2).unwrap();
        match (
            Analytic::new(RegimeCase::NonDegDispExact, &spec2, &dispersive_5),
            Analytic::new(RegimeCase::NonDegNoDisp, &spec2, &flat),
        ) {
            (Ok(a), Ok(b)) => {
                let mut worst = 0.0f64;
                for i in 0..401 {
                    let tau = 7.0 + (i as f64 - 200.0) * 0.37;
                    let (x, y) = (a.terms(tau).as_array(), b.terms(tau).as_array());
                    for k in 0..4 {
                        worst = worst.max((x[k] - y[k]).abs() / 4.0);
                    }
                }
                o.below("case 5 at kappa = 0 vs case 2", worst, 1e-14);
            }
            _ => o.fail("case 5 at kappa = 0 vs case 2", "case rejected its inputs"),
        }
    })
}
