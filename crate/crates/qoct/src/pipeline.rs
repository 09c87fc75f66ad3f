//! The three run modes. Each has an in-memory core used by the self-test and
//! a file-level wrapper used by the CLI.

use std::path::{Path, PathBuf};

use qoct_core::analytic::{Analytic, RegimeGuards, Term};
use qoct_core::dsp::{
    self, apply_efficiency, axial_resolution, broadening_correction, correct_and_combine,
    fit_gaussian, BandwidthMeasure, Channel, ComplexSpectrum, EfficiencyCurve, FitOptions,
    GaussianPeakFit, ZoneConfig,
};
use qoct_core::engine::{EngineOptions, Interferogram, KernelKind, TauGrid, TermValues};
use qoct_core::source::{
    bandwidth_from_waist, estimate_generated_rate, fwhm_from_integral, spectral_coincidence_efficiency,
    spectral_rate_s0, SourceParams, ValidityThresholds,
};
use qoct_core::units::{delay_to_mirror_displacement, rad_per_fs_to_thz};
use qoct_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use crate::config::{Method, RunConfig};
use crate::error::{AppError, AppResult};
use crate::fft::{self, FftOptions, Window};
use crate::{io, par};

const KINDS: [KernelKind; 5] = [
    KernelKind::Total,
    KernelKind::Constant,
    KernelKind::Hom,
    KernelKind::SinglePhoton,
    KernelKind::Pump,
];

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub rad_per_fs: f64,
    #[serde(rename = "THz")]
    pub thz: f64,
}

impl Frequency {
    pub fn new(rad_per_fs: f64) -> Self {
        Self {
            rad_per_fs,
            thz: rad_per_fs_to_thz(rad_per_fs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub omega0: Frequency,
    pub delta: Frequency,
    pub big_delta: Frequency,
    pub detuning: Frequency,
    pub r: f64,
    pub delay_fs: f64,
    pub kappa_fs2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub start_fs: f64,
    pub step_fs: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardReport {
    pub dispersion_cancellation: f64,
    pub narrowband_pump: f64,
    pub dispersion_significance: f64,
    pub violations: Vec<String>,
}

/// Sup-norm of `oracle − analytic` over the grid, divided by the sup-norm of
/// the analytic series, per term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    #[serde(rename = "M")]
    pub total: f64,
    #[serde(rename = "Mc")]
    pub mc: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub case: u8,
    pub method: String,
    pub parameters: ParameterReport,
    pub grid: GridReport,
    pub guards: GuardReport,
    pub max_relative_deviation: Option<Deviation>,
    pub files: Vec<String>,
}

pub fn series(grid: &TauGrid, values: &[TermValues], kind: KernelKind) -> AppResult<Interferogram> {
    Ok(par::series(grid, values, kind)?)
}

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

/// Relative sup-norm deviation of one term.
pub fn relative_deviation(oracle: &[TermValues], analytic: &[TermValues], kind: KernelKind) -> f64 {
    let pick = |t: &TermValues| match kind {
        KernelKind::Total => t.total(),
        k => t.get(k),
    };
    let num = sup(oracle.iter().zip(analytic).map(|(o, a)| pick(o) - pick(a)));
    let den = sup(analytic.iter().map(pick));
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn deviation(oracle: &[TermValues], analytic: &[TermValues]) -> Deviation {
    let d = |k| relative_deviation(oracle, analytic, k);
    Deviation {
        total: d(KernelKind::Total),
        mc: d(KernelKind::Constant),
        m0: d(KernelKind::Hom),
        m1: d(KernelKind::SinglePhoton),
        m2: d(KernelKind::Pump),
    }
}

/// Forward detection model: VIS-VIS and IR-VIS interferograms from the true
/// interferogram. Both are mean-free.
pub fn degrade(
    truth: &Interferogram,
    vis: &EfficiencyCurve,
    ir: &EfficiencyCurve,
    zones: &ZoneConfig,
) -> AppResult<(Interferogram, Interferogram)> {
    let opts = FftOptions {
        zero_pad: 1,
        window: Window::None,
    };
    let spec = fft::fft_spectrum(truth, &opts)?;
    let mut out = Vec::with_capacity(2);
    for (ch, label) in [(Channel::VisVis, "vis_vis"), (Channel::IrVis, "ir_vis")] {
        let s = apply_efficiency(&spec, vis, ir, zones, ch)?;
        let mut ig = fft::extract_term(&s)?;
        ig.label = label.into();
        out.push(ig);
    }
    let iv = out.pop().unwrap();
    let vv = out.pop().unwrap();
    Ok((vv, iv))
}

pub fn simulate(cfg: &RunConfig, out: &Path, threads: Option<usize>) -> AppResult<SimulateReport> {
    let spec = cfg.spectrum()?;
    let sample = cfg.sample(spec.omega0())?;
    let grid = cfg.grid(&spec, &sample)?;
    let case = cfg.case(&spec, &sample)?;
    let sim = cfg.simulate.clone().unwrap_or_default();
    let rel_tol = sim.rel_tol.unwrap_or(EngineOptions::default().rel_tol);
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(AppError::config("simulate.rel_tol", "must lie in (0, 1)"));
    }
    let analytic = match sim.method {
        Method::Oracle => None,
        _ => Some(
            Analytic::new(case, &spec, &sample)
                .map_err(|e| AppError::config("simulate.case", e.to_string()))?
                .with_m2_form(cfg.m2_form()),
        ),
    };
    let detection = match &sim.detection {
        Some(d) => {
            let vis = io::read_efficiency(&cfg.input_file("simulate.detection.eta_vis_csv", &d.eta_vis_csv)?)?;
            let ir = io::read_efficiency(&cfg.input_file("simulate.detection.eta_ir_csv", &d.eta_ir_csv)?)?;
            let zones = d.zones.build("simulate.detection.zones", Some(spec.omega0()))?;
            Some((vis, ir, zones))
        }
        None => None,
    };

    let opts = EngineOptions {
        rel_tol,
        ..EngineOptions::default()
    };
    let oracle = match sim.method {
        Method::Analytic => None,
        _ => Some(par::with_threads(threads, || par::terms(&grid, &spec, &sample, &opts))?),
    };
    let closed = analytic
        .as_ref()
        .map(|a| grid.taus().map(|t| a.terms(t)).collect::<Vec<_>>());

    let mut files = Vec::new();
    for (name, values) in [("oracle", &oracle), ("analytic", &closed)] {
        let Some(values) = values else { continue };
        for kind in KINDS {
            let ig = series(&grid, values, kind)?;
            let file = format!("{name}_{}.csv", par::kind_label(kind));
            io::write_interferogram(&out.join(&file), &ig)?;
            files.push(file);
        }
    }
    if let Some((vis, ir, zones)) = &detection {
        let primary = oracle.as_ref().or(closed.as_ref()).unwrap();
        let truth = series(&grid, primary, KernelKind::Total)?;
        let (vv, iv) = degrade(&truth, vis, ir, zones)?;
        for (file, ig) in [("vis_vis.csv", &vv), ("ir_vis.csv", &iv)] {
            io::write_interferogram(&out.join(file), ig)?;
            files.push(file.into());
        }
    }

    let guards = RegimeGuards::evaluate(&spec, &sample);
    let violations = match &analytic {
        Some(a) => a.violations().iter().map(|v| v.to_string()).collect(),
        None => Vec::new(),
    };
    let report = SimulateReport {
        case: case.number(),
        method: match sim.method {
            Method::Oracle => "oracle",
            Method::Analytic => "analytic",
            Method::Both => "both",
        }
        .into(),
        parameters: ParameterReport {
            omega0: Frequency::new(spec.omega0()),
            delta: Frequency::new(spec.delta()),
            big_delta: Frequency::new(spec.big_delta()),
            detuning: Frequency::new(spec.detuning()),
            r: sample.r(),
            delay_fs: sample.delay(),
            kappa_fs2: sample.kappa(),
        },
        grid: GridReport {
            start_fs: grid.start,
            step_fs: grid.step,
            points: grid.len,
        },
        guards: GuardReport {
            dispersion_cancellation: guards.dispersion_cancellation,
            narrowband_pump: guards.narrowband_pump,
            dispersion_significance: guards.dispersion_significance,
            violations,
        },
        max_relative_deviation: match (&oracle, &closed) {
            (Some(o), Some(a)) => Some(deviation(o, a)),
            _ => None,
        },
        files: {
            files.push("simulate.json".into());
            files
        },
    };
    io::write_json(&out.join("simulate.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub center: f64,
    pub std: f64,
    pub fwhm: f64,
    pub amplitude: f64,
    pub residual_rms: f64,
}

impl From<&GaussianPeakFit> for FitReport {
    fn from(f: &GaussianPeakFit) -> Self {
        Self {
            center: f.center,
            std: f.std,
            fwhm: f.fwhm(),
            amplitude: f.amplitude,
            residual_rms: f.residual_rms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFitReport {
    pub center: Frequency,
    pub std: Frequency,
    pub fwhm: Frequency,
    pub amplitude: f64,
    pub residual_rms: f64,
}

impl From<&GaussianPeakFit> for SpectralFitReport {
    fn from(f: &GaussianPeakFit) -> Self {
        Self {
            center: Frequency::new(f.center),
            std: Frequency::new(f.std),
            fwhm: Frequency::new(f.fwhm()),
            amplitude: f.amplitude,
            residual_rms: f.residual_rms,
        }
    }
}

/// Per-term result. `fit` is in the delay domain (fs); `spectral_fit` is the
/// Gaussian fit of the corrected spectral magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub term: String,
    pub zone_boundaries_rad_per_fs: Vec<f64>,
    #[serde(rename = "zone_boundaries_THz")]
    pub zone_boundaries_thz: Vec<f64>,
    /// `"direct"` or `"envelope"`: what the delay-domain fit was applied to.
    pub fitted_signal: String,
    pub fit: FitReport,
    pub spectral_fit: SpectralFitReport,
    /// Spectral FWHM after the stage-jitter broadening correction, rad/fs.
    pub corrected_fwhm: f64,
    #[serde(rename = "corrected_fwhm_THz")]
    pub corrected_fwhm_thz: f64,
    /// `2 ln2·c/corrected_fwhm`.
    pub axial_resolution_um: f64,
    /// `c·fit.fwhm/2`: the delay-domain width as a mirror displacement.
    pub depth_fwhm_um: f64,
    /// `fit.fwhm` over the same quantity of the reference run.
    pub reference_fwhm_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub zero_pad: usize,
    pub window: String,
    pub omega_step: Frequency,
    pub pump_peak_fwhm: Frequency,
    pub terms: Vec<TermReport>,
}

impl AnalysisReport {
    pub fn term(&self, name: &str) -> Option<&TermReport> {
        self.terms.iter().find(|t| t.term == name)
    }
}

/// Everything the analysis produces for one term.
#[derive(Debug, Clone)]
pub struct TermOutput {
    pub term: Term,
    pub spectrum: ComplexSpectrum,
    pub processed: Interferogram,
    pub envelope: Interferogram,
    pub fit: GaussianPeakFit,
    pub spectral_fit: GaussianPeakFit,
    pub envelope_fitted: bool,
}

#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    pub spectrum_vv: ComplexSpectrum,
    pub spectrum_iv: ComplexSpectrum,
    pub terms: Vec<TermOutput>,
    pub report: AnalysisReport,
}

pub struct AnalysisInput<'a> {
    pub vis_vis: &'a Interferogram,
    pub ir_vis: &'a Interferogram,
    pub eta_vis: &'a EfficiencyCurve,
    pub eta_ir: &'a EfficiencyCurve,
    pub zones: &'a ZoneConfig,
    pub fft: FftOptions,
    pub pump_peak_fwhm: f64,
}

fn term_name(t: Term) -> &'static str {
    match t {
        Term::M0 => "M0",
        Term::M1 => "M1",
        Term::M2 => "M2",
    }
}

/// Gaussian fit of `|M̃|` over the term's nonzero bins. `M̃₀` is fitted over
/// signed frequencies so a peak at zero is seen whole.
fn spectral_fit(spec: &ComplexSpectrum, term: Term) -> AppResult<GaussianPeakFit> {
    let n = spec.len();
    let mut pts: Vec<(f64, f64)> = (0..n)
        .filter(|&k| spec.values()[k] != Complex64::new(0.0, 0.0))
        .map(|k| (spec.frequency(k), spec.values()[k].norm()))
        .filter(|&(w, _)| term == Term::M0 || w >= 0.0)
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Ok(fit_gaussian(&xs, &ys, &FitOptions::default())?)
}

fn fit_delay(ig: &Interferogram) -> AppResult<GaussianPeakFit> {
    let xs: Vec<f64> = ig.taus().collect();
    Ok(fit_gaussian(
        &xs,
        ig.values(),
        &FitOptions {
            with_offset: true,
            ..FitOptions::default()
        },
    )?)
}

fn zone_bounds(zones: &ZoneConfig, term: Term) -> Vec<f64> {
    let zs: Vec<_> = dsp::zones(zones).into_iter().filter(|z| z.term == term).collect();
    let mut b: Vec<f64> = zs.iter().map(|z| z.lo).collect();
    b.push(zs.last().map(|z| z.hi).unwrap_or(0.0));
    b
}

fn same_grid(a: &Interferogram, b: &Interferogram) -> bool {
    a.len() == b.len()
        && (a.tau_start() - b.tau_start()).abs() <= 1e-9 * a.tau_step()
        && (a.tau_step() - b.tau_step()).abs() <= 1e-12 * a.tau_step()
}

/// FFT, zone correction, term extraction, envelope and fits.
pub fn analyze_data(input: &AnalysisInput) -> AppResult<AnalysisOutput> {
    if !same_grid(input.vis_vis, input.ir_vis) {
        return Err(Error::GridMismatch("VIS-VIS and IR-VIS delay grids").into());
    }
    let iv = Interferogram::new(
        input.vis_vis.tau_start(),
        input.vis_vis.tau_step(),
        input.ir_vis.values().to_vec(),
        input.ir_vis.label.clone(),
    )?;
    let spectrum_vv = fft::fft_spectrum(input.vis_vis, &input.fft)?;
    let spectrum_iv = fft::fft_spectrum(&iv, &input.fft)?;

    let mut terms = Vec::new();
    let mut reports = Vec::new();
    for term in [Term::M0, Term::M1] {
        let spectrum = correct_and_combine(
            &spectrum_vv,
            &spectrum_iv,
            input.eta_vis,
            input.eta_ir,
            input.zones,
            term,
        )?;
        let processed = fft::extract_term(&spectrum)?;
        let envelope = fft::envelope(&processed)?;
        let sfit = spectral_fit(&spectrum, term)?;
        // A term whose spectrum sits at zero frequency does not oscillate and
        // is fitted directly; otherwise its envelope is.
        let envelope_fitted = sfit.center.abs() > 2.0 * sfit.std;
        let fit = fit_delay(if envelope_fitted { &envelope } else { &processed })?;
        let corrected = broadening_correction(sfit.fwhm(), input.pump_peak_fwhm)?;
        let bounds = zone_bounds(input.zones, term);
        reports.push(TermReport {
            term: term_name(term).into(),
            zone_boundaries_thz: bounds.iter().map(|&b| rad_per_fs_to_thz(b)).collect(),
            zone_boundaries_rad_per_fs: bounds,
            fitted_signal: if envelope_fitted { "envelope" } else { "direct" }.into(),
            fit: FitReport::from(&fit),
            spectral_fit: SpectralFitReport::from(&sfit),
            corrected_fwhm: corrected,
            corrected_fwhm_thz: rad_per_fs_to_thz(corrected),
            axial_resolution_um: axial_resolution(corrected)?,
            depth_fwhm_um: delay_to_mirror_displacement(fit.fwhm()),
            reference_fwhm_ratio: None,
        });
        terms.push(TermOutput {
            term,
            spectrum,
            processed,
            envelope,
            fit,
            spectral_fit: sfit,
            envelope_fitted,
        });
    }
    let report = AnalysisReport {
        zero_pad: input.fft.zero_pad,
        window: match input.fft.window {
            Window::None => "none",
            Window::RaisedCosine => "raised_cosine",
        }
        .into(),
        omega_step: Frequency::new(spectrum_vv.omega_step()),
        pump_peak_fwhm: Frequency::new(input.pump_peak_fwhm),
        terms: reports,
    };
    Ok(AnalysisOutput {
        spectrum_vv,
        spectrum_iv,
        terms,
        report,
    })
}

pub fn analyze(cfg: &RunConfig, out: &Path, zero_pad: Option<usize>) -> AppResult<AnalysisReport> {
    let a = cfg.analyze_section()?;
    let vv_path = cfg.input_file("analyze.vis_vis_csv", &a.vis_vis_csv)?;
    let iv_path = cfg.input_file("analyze.ir_vis_csv", &a.ir_vis_csv)?;
    let vis_path = cfg.input_file("analyze.eta_vis_csv", &a.eta_vis_csv)?;
    let ir_path = cfg.input_file("analyze.eta_ir_csv", &a.eta_ir_csv)?;
    let reference = a
        .reference_report
        .as_ref()
        .map(|p| cfg.input_file("analyze.reference_report", p))
        .transpose()?;
    let zones = a.zones.build("analyze.zones", None)?;
    let fft_opts = a.fft_options(zero_pad)?;
    let pump_peak_fwhm = a.pump_peak_fwhm()?;

    let vis_vis = io::read_interferogram(&vv_path)?;
    let ir_vis = io::read_interferogram(&iv_path)?;
    let eta_vis = io::read_efficiency(&vis_path)?;
    let eta_ir = io::read_efficiency(&ir_path)?;
    let reference: Option<AnalysisReport> = reference.map(|p| io::read_json(&p)).transpose()?;

    let mut result = analyze_data(&AnalysisInput {
        vis_vis: &vis_vis,
        ir_vis: &ir_vis,
        eta_vis: &eta_vis,
        eta_ir: &eta_ir,
        zones: &zones,
        fft: fft_opts,
        pump_peak_fwhm,
    })?;
    if let Some(r) = &reference {
        for t in &mut result.report.terms {
            t.reference_fwhm_ratio = r.term(&t.term).map(|rt| t.fit.fwhm / rt.fit.fwhm);
        }
    }

    io::write_spectrum(&out.join("spectrum_vis_vis.csv"), &result.spectrum_vv)?;
    io::write_spectrum(&out.join("spectrum_ir_vis.csv"), &result.spectrum_iv)?;
    for t in &result.terms {
        let name = term_name(t.term);
        io::write_spectrum(&out.join(format!("{name}_spectrum.csv")), &t.spectrum)?;
        io::write_interferogram(&out.join(format!("{name}_processed.csv")), &t.processed)?;
        io::write_interferogram(&out.join(format!("{name}_envelope.csv")), &t.envelope)?;
    }
    io::write_json(&out.join("analysis.json"), &result.report)?;
    Ok(result.report)
}

// ---------------------------------------------------------------- source

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedRateReport {
    pub r_detected_cps: f64,
    #[serde(rename = "R_generated_per_mW")]
    pub r_generated_per_mw: f64,
    #[serde(rename = "measured_B_THz")]
    pub measured_b_thz: f64,
    #[serde(rename = "S0_measured_per_THz_mW")]
    pub s0_measured_per_thz_mw: f64,
}

/// Rates use ordinary frequency in THz as the spectral unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceReport {
    #[serde(rename = "S0_per_THz_mW")]
    pub s0_per_thz_mw: f64,
    #[serde(rename = "B_THz")]
    pub b_thz: f64,
    #[serde(rename = "B_rad_per_fs")]
    pub b_rad_per_fs: f64,
    pub fwhm: Frequency,
    #[serde(rename = "R_cps")]
    pub r_cps: f64,
    #[serde(rename = "pump_power_mW")]
    pub pump_power_mw: f64,
    pub overlap_length_um: f64,
    pub validity_warnings: Vec<String>,
    pub generated: Option<GeneratedRateReport>,
}

/// Source-model report for `p`.
pub fn source_model(p: &SourceParams) -> AppResult<SourceReport> {
    let s0 = spectral_rate_s0(p, &ValidityThresholds::default())?;
    let b = bandwidth_from_waist(p.waist)?;
    let b_thz = rad_per_fs_to_thz(b);
    Ok(SourceReport {
        s0_per_thz_mw: s0.per_thz_mw,
        b_thz,
        b_rad_per_fs: b,
        fwhm: Frequency::new(fwhm_from_integral(b)),
        r_cps: s0.per_thz * b_thz,
        pump_power_mw: p.pump_power,
        overlap_length_um: p.overlap_length(),
        validity_warnings: s0.warnings.iter().map(|w| w.to_string()).collect(),
        generated: None,
    })
}

/// Gaussian `|M̃₁|` centred at `(ω_s+ω_i)/2` with integral bandwidth `b`,
/// cut at ±5 standard deviations.
pub fn synthetic_m1_spectrum(p: &SourceParams, b: f64) -> AppResult<ComplexSpectrum> {
    let omega_p = p.omega_s + p.omega_i;
    let center = omega_p / 2.0;
    let std = dsp::bandwidth_convert(b, BandwidthMeasure::Integral, BandwidthMeasure::Std);
    let n = 8192;
    let tau_step = std::f64::consts::PI / omega_p;
    let step = 2.0 * std::f64::consts::PI / (n as f64 * tau_step);
    let values = (0..n)
        .map(|k| {
            let w = k as f64 * step;
            let d = (w - center) / std;
            if k <= n / 2 && d.abs() <= 5.0 {
                Complex64::new((-0.5 * d * d).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(ComplexSpectrum::from_dft(values, 0.0, tau_step, n, 1, "M1")?)
}

pub fn source(cfg: &RunConfig, out: &Path) -> AppResult<SourceReport> {
    let s = cfg.source_section()?;
    let p = cfg.source_params()?;
    let m1_path = s
        .m1_spectrum_csv
        .as_ref()
        .map(|f| cfg.input_file("source.m1_spectrum_csv", f))
        .transpose()?;
    let eta_path = s
        .eta_vis_csv
        .as_ref()
        .map(|f| cfg.input_file("source.eta_vis_csv", f))
        .transpose()?;
    if let Some(r) = s.r_detected_cps {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(AppError::config("source.r_detected_cps", format!("value {r} must be >= 0")));
        }
    }
    if let Some(b) = s.measured_bandwidth_thz {
        if !(b > 0.0 && b.is_finite()) {
            return Err(AppError::config("source.measured_bandwidth_THz", format!("value {b} must be > 0")));
        }
    }

    let mut report = source_model(&p)?;
    if let Some(r_detected) = s.r_detected_cps {
        let omega_p = p.omega_s + p.omega_i;
        let m1 = match &m1_path {
            Some(f) => io::read_spectrum(f)?,
            None => synthetic_m1_spectrum(&p, report.b_rad_per_fs)?,
        };
        let eta = match &eta_path {
            Some(f) => io::read_efficiency(f)?,
            None => EfficiencyCurve::constant(1.0, 0.0, omega_p)?,
        };
        let r_gen = estimate_generated_rate(&m1, &eta, omega_p, r_detected, p.pump_power)?;
        let measured_b_thz = match s.measured_bandwidth_thz {
            Some(b) => b,
            None => {
                let f = spectral_fit(&m1, Term::M1)?;
                rad_per_fs_to_thz(dsp::bandwidth_convert(
                    f.std,
                    BandwidthMeasure::Std,
                    BandwidthMeasure::Integral,
                ))
            }
        };
        report.generated = Some(GeneratedRateReport {
            r_detected_cps: r_detected,
            r_generated_per_mw: r_gen,
            measured_b_thz,
            s0_measured_per_thz_mw: spectral_coincidence_efficiency(r_gen, measured_b_thz)?,
        });
    }
    io::write_json(&out.join("source.json"), &report)?;
    Ok(report)
}

/// Output directory, created if needed.
pub fn prepare_out(dir: PathBuf) -> AppResult<PathBuf> {
    std::fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
    Ok(dir)
}
