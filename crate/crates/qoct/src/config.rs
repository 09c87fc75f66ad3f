//! TOML run configuration. Every dimensional key carries its unit.
//!
//! ```toml
//! [spectrum]
//! pump_wavelength_nm = 405.0      # or omega0_rad_per_fs
//! delta_THz = 0.1                 # or delta_rad_per_fs
//! big_delta_THz = 50.0            # or big_delta_rad_per_fs
//! detuning_THz = 0.0              # or detuning_rad_per_fs
//!
//! [sample]
//! r = 1.0
//! delay_fs = 0.0
//! kappa_fs2 = 0.0                 # or a [sample.layer] table
//!
//! [grid]                          # optional, default grid otherwise
//! start_fs = -100.0
//! step_fs = 0.1
//! points = 2001
//! ```
//!
//! Relative file paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use qoct_core::analytic::{DispersiveM2Form, RegimeCase};
use qoct_core::dsp::ZoneConfig;
use qoct_core::engine::{self, TauGrid};
use qoct_core::samples::{MaterialLayer, SampleResponse};
use qoct_core::source::SourceParams;
use qoct_core::spectra::BiphotonSpectrum;
use qoct_core::units::{thz_to_rad_per_fs, wavelength_nm_to_omega};
use serde::Deserialize;

use crate::error::{in_section, AppError, AppResult};
use crate::fft::{FftOptions, Window};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spectrum: Option<SpectrumSection>,
    pub sample: Option<SampleSection>,
    pub grid: Option<GridSection>,
    pub simulate: Option<SimulateSection>,
    pub analyze: Option<AnalyzeSection>,
    pub source: Option<SourceSection>,
    pub output: Option<OutputSection>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub omega0_rad_per_fs: Option<f64>,
    pub pump_wavelength_nm: Option<f64>,
    pub delta_rad_per_fs: Option<f64>,
    #[serde(rename = "delta_THz")]
    pub delta_thz: Option<f64>,
    pub big_delta_rad_per_fs: Option<f64>,
    #[serde(rename = "big_delta_THz")]
    pub big_delta_thz: Option<f64>,
    pub detuning_rad_per_fs: Option<f64>,
    #[serde(rename = "detuning_THz")]
    pub detuning_thz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub r: Option<f64>,
    pub delay_fs: Option<f64>,
    pub kappa_fs2: Option<f64>,
    pub layer: Option<LayerSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSection {
    pub thickness_um: f64,
    pub n0: f64,
    /// ∂n/∂ω at ω₀ in fs/rad.
    pub dn_domega_fs: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start_fs: f64,
    pub step_fs: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    Analytic,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum M2Form {
    #[default]
    Gaussian,
    Erf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default)]
    pub method: Method,
    /// Regime case 1–6 for the closed form; the exact case of the inputs
    /// when absent.
    pub case: Option<u8>,
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub m2_form: M2Form,
    /// Optional forward detection model producing VIS-VIS and IR-VIS files.
    pub detection: Option<DetectionSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    pub eta_vis_csv: PathBuf,
    pub eta_ir_csv: PathBuf,
    pub zones: ZoneSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSection {
    pub omega_p_rad_per_fs: Option<f64>,
    pub pump_wavelength_nm: Option<f64>,
    pub delta_c_rad_per_fs: Option<f64>,
    pub cutoff_wavelength_nm: Option<f64>,
    pub zone5_right_rad_per_fs: Option<f64>,
    /// λ_lim; sets the zone-5 right edge to `ω_p − 2πc/λ_lim`.
    pub limit_wavelength_nm: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowName {
    #[default]
    None,
    RaisedCosine,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    pub vis_vis_csv: PathBuf,
    pub ir_vis_csv: PathBuf,
    pub eta_vis_csv: PathBuf,
    pub eta_ir_csv: PathBuf,
    pub zones: ZoneSection,
    pub pump_peak_fwhm_rad_per_fs: Option<f64>,
    #[serde(rename = "pump_peak_fwhm_THz")]
    pub pump_peak_fwhm_thz: Option<f64>,
    pub zero_pad: Option<usize>,
    #[serde(default)]
    pub window: WindowName,
    /// `analysis.json` of a reference run; widths are reported as ratios.
    pub reference_report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    /// `"reference_bbo"` or absent for fully explicit parameters.
    pub preset: Option<String>,
    #[serde(rename = "d_eff_pm_per_V")]
    pub d_eff_pm_per_v: Option<f64>,
    #[serde(rename = "pump_power_mW")]
    pub pump_power_mw: Option<f64>,
    pub signal_wavelength_nm: Option<f64>,
    pub idler_wavelength_nm: Option<f64>,
    pub pump_wavelength_nm: Option<f64>,
    pub n_p: Option<f64>,
    pub n_s: Option<f64>,
    pub n_i: Option<f64>,
    pub walkoff_deg: Option<f64>,
    pub waist_um: Option<f64>,
    pub crystal_length_um: Option<f64>,
    pub r_detected_cps: Option<f64>,
    pub m1_spectrum_csv: Option<PathBuf>,
    /// Unit efficiency when absent.
    pub eta_vis_csv: Option<PathBuf>,
    /// Integral bandwidth of the measured single-photon spectrum.
    #[serde(rename = "measured_bandwidth_THz")]
    pub measured_bandwidth_thz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Exactly one of several unit variants of a parameter.
fn one_of(section: &str, opts: &[(&str, Option<f64>)], default: Option<f64>) -> AppResult<f64> {
    let given: Vec<(&str, f64)> = opts
        .iter()
        .filter_map(|(k, v)| v.map(|v| (*k, v)))
        .collect();
    let names = opts.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(" or ");
    match (given.as_slice(), default) {
        ([(k, v)], _) if !v.is_finite() => Err(AppError::config(
            format!("{section}.{k}"),
            "must be finite",
        )),
        ([(_, v)], _) => Ok(*v),
        ([], Some(d)) => Ok(d),
        ([], None) => Err(AppError::config(
            format!("{section}.{}", opts[0].0),
            format!("missing; set {names}"),
        )),
        _ => Err(AppError::config(
            format!("{section}.{}", given[1].0),
            format!("conflicts with {section}.{}; set only one of {names}", given[0].0),
        )),
    }
}

fn require(ok: bool, field: &str, message: &str) -> AppResult<()> {
    if ok {
        Ok(())
    } else {
        Err(AppError::config(field, message))
    }
}

fn positive(field: &str, v: f64) -> AppResult<f64> {
    require(v > 0.0 && v.is_finite(), field, &format!("value {v} must be > 0"))?;
    Ok(v)
}

fn nm(field: &str, v: Option<f64>) -> AppResult<Option<f64>> {
    v.map(|l| positive(field, l).map(wavelength_nm_to_omega))
        .transpose()
}

fn thz(v: Option<f64>) -> Option<f64> {
    v.map(thz_to_rad_per_fs)
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> AppResult<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_owned)
                .unwrap_or_else(|| "config".into());
            AppError::config(field, msg)
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, dir)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Resolved path that must exist.
    pub fn input_file(&self, field: &str, p: &Path) -> AppResult<PathBuf> {
        let full = self.resolve(p);
        require(
            full.is_file(),
            field,
            &format!("file {} does not exist", full.display()),
        )?;
        Ok(full)
    }

    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        match (cli, self.output.as_ref().and_then(|o| o.dir.as_ref())) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.resolve(p),
            (None, None) => PathBuf::from("qoct-out"),
        }
    }

    pub fn spectrum(&self) -> AppResult<BiphotonSpectrum> {
        let s = self
            .spectrum
            .as_ref()
            .ok_or_else(|| AppError::config("spectrum", "missing section"))?;
        let w0 = one_of(
            "spectrum",
            &[
                ("omega0_rad_per_fs", s.omega0_rad_per_fs),
                ("pump_wavelength_nm", nm("spectrum.pump_wavelength_nm", s.pump_wavelength_nm)?.map(|w| w / 2.0)),
            ],
            None,
        )?;
        let delta = one_of(
            "spectrum",
            &[("delta_rad_per_fs", s.delta_rad_per_fs), ("delta_THz", thz(s.delta_thz))],
            None,
        )?;
        let big = one_of(
            "spectrum",
            &[
                ("big_delta_rad_per_fs", s.big_delta_rad_per_fs),
                ("big_delta_THz", thz(s.big_delta_thz)),
            ],
            None,
        )?;
        let om = one_of(
            "spectrum",
            &[
                ("detuning_rad_per_fs", s.detuning_rad_per_fs),
                ("detuning_THz", thz(s.detuning_thz)),
            ],
            Some(0.0),
        )?;
        let key = |rad: &str, t: &str, thz_given: bool| {
            format!("spectrum.{}", if thz_given { t } else { rad })
        };
        require(w0 > 0.0, "spectrum.omega0_rad_per_fs", &format!("value {w0} must be > 0"))?;
        require(
            delta > 0.0,
            &key("delta_rad_per_fs", "delta_THz", s.delta_thz.is_some()),
            &format!("value {delta} rad/fs must be > 0"),
        )?;
        require(
            big > 0.0,
            &key("big_delta_rad_per_fs", "big_delta_THz", s.big_delta_thz.is_some()),
            &format!("value {big} rad/fs must be > 0"),
        )?;
        require(
            om >= 0.0,
            &key("detuning_rad_per_fs", "detuning_THz", s.detuning_thz.is_some()),
            &format!("value {om} rad/fs must be >= 0"),
        )?;
        BiphotonSpectrum::new(w0, delta, big, om).map_err(|e| in_section("spectrum", e))
    }

    pub fn sample(&self, omega0: f64) -> AppResult<SampleResponse> {
        let s = self.sample.clone().unwrap_or_default();
        let r = s.r.unwrap_or(1.0);
        require(
            (0.0..=1.0).contains(&r),
            "sample.r",
            &format!("value {r} must lie in [0, 1]"),
        )?;
        match s.layer {
            Some(l) => {
                require(
                    s.delay_fs.is_none() && s.kappa_fs2.is_none(),
                    "sample.layer",
                    "give either sample.layer or delay_fs/kappa_fs2, not both",
                )?;
                let layer = MaterialLayer::new(l.thickness_um, l.n0, l.dn_domega_fs)
                    .map_err(|e| in_section("sample.layer", e))?;
                SampleResponse::from_material(&layer, r, omega0).map_err(|e| in_section("sample", e))
            }
            None => {
                let delay = s.delay_fs.unwrap_or(0.0);
                let kappa = s.kappa_fs2.unwrap_or(0.0);
                require(delay.is_finite(), "sample.delay_fs", "must be finite")?;
                require(kappa.is_finite(), "sample.kappa_fs2", "must be finite")?;
                SampleResponse::new(r, delay, kappa, omega0).map_err(|e| in_section("sample", e))
            }
        }
    }

    pub fn grid(&self, spec: &BiphotonSpectrum, sample: &SampleResponse) -> AppResult<TauGrid> {
        match &self.grid {
            None => Ok(engine::default_grid(spec, sample)),
            Some(g) => {
                require(g.start_fs.is_finite(), "grid.start_fs", "must be finite")?;
                positive("grid.step_fs", g.step_fs)?;
                require(g.points >= 2, "grid.points", "must be >= 2")?;
                let max = engine::max_tau_step(spec.omega0());
                require(
                    g.step_fs <= max * (1.0 + 1e-12),
                    "grid.step_fs",
                    &format!("value {} exceeds the sampling limit pi/(8 omega0) = {max} fs", g.step_fs),
                )?;
                TauGrid::new(g.start_fs, g.step_fs, g.points).map_err(|e| in_section("grid", e))
            }
        }
    }

    pub fn case(&self, spec: &BiphotonSpectrum, sample: &SampleResponse) -> AppResult<RegimeCase> {
        match self.simulate.as_ref().and_then(|s| s.case) {
            None => Ok(RegimeCase::exact_for(spec, sample)),
            Some(n) => RegimeCase::from_number(n)
                .ok_or_else(|| AppError::config("simulate.case", format!("{n} is not in 1..=6"))),
        }
    }

    pub fn m2_form(&self) -> DispersiveM2Form {
        match self.simulate.as_ref().map(|s| s.m2_form).unwrap_or_default() {
            M2Form::Gaussian => DispersiveM2Form::Gaussian,
            M2Form::Erf => DispersiveM2Form::ErfAugmented,
        }
    }

    pub fn analyze_section(&self) -> AppResult<&AnalyzeSection> {
        self.analyze
            .as_ref()
            .ok_or_else(|| AppError::config("analyze", "missing section"))
    }

    pub fn source_section(&self) -> AppResult<&SourceSection> {
        self.source
            .as_ref()
            .ok_or_else(|| AppError::config("source", "missing section"))
    }

    /// Source parameters: the preset (if any) overridden by explicit keys.
    pub fn source_params(&self) -> AppResult<SourceParams> {
        let s = self.source_section()?;
        let preset = match s.preset.as_deref() {
            Some("reference_bbo") => Some(SourceParams::reference_bbo()),
            Some(other) => {
                return Err(AppError::config(
                    "source.preset",
                    format!("unknown preset `{other}`; known: reference_bbo"),
                ))
            }
            None => None,
        };
        let get = |key: &str, v: Option<f64>, base: Option<f64>| -> AppResult<f64> {
            let field = format!("source.{key}");
            match v.or(base) {
                Some(x) => positive(&field, x),
                None => Err(AppError::config(field, "missing (no preset)")),
            }
        };
        let b = preset.as_ref();
        let lambda_p = get("pump_wavelength_nm", s.pump_wavelength_nm, b.map(|b| b.lambda_p))?;
        let omega_s = match s.signal_wavelength_nm {
            Some(l) => wavelength_nm_to_omega(positive("source.signal_wavelength_nm", l)?),
            None => get("signal_wavelength_nm", None, b.map(|b| b.omega_s))?,
        };
        let omega_i = match s.idler_wavelength_nm {
            Some(l) => wavelength_nm_to_omega(positive("source.idler_wavelength_nm", l)?),
            None => get("idler_wavelength_nm", None, b.map(|b| b.omega_i))?,
        };
        let p = SourceParams {
            d_eff: get("d_eff_pm_per_V", s.d_eff_pm_per_v, b.map(|b| b.d_eff))?,
            pump_power: get("pump_power_mW", s.pump_power_mw, b.map(|b| b.pump_power))?,
            omega_s,
            omega_i,
            n_p: get("n_p", s.n_p, b.map(|b| b.n_p))?,
            n_s: get("n_s", s.n_s, b.map(|b| b.n_s))?,
            n_i: get("n_i", s.n_i, b.map(|b| b.n_i))?,
            walkoff: match s.walkoff_deg {
                Some(d) => positive("source.walkoff_deg", d)?.to_radians(),
                None => get("walkoff_deg", None, b.map(|b| b.walkoff))?,
            },
            waist: get("waist_um", s.waist_um, b.map(|b| b.waist))?,
            crystal_length: get("crystal_length_um", s.crystal_length_um, b.map(|b| b.crystal_length))?,
            lambda_p,
        };
        p.validate().map_err(|e| in_section("source", e))?;
        Ok(p)
    }
}

impl ZoneSection {
    /// Pump frequency defaults to `2ω₀` when `omega0` is known.
    pub fn build(&self, section: &str, omega0: Option<f64>) -> AppResult<ZoneConfig> {
        let wp = one_of(
            section,
            &[
                ("omega_p_rad_per_fs", self.omega_p_rad_per_fs),
                ("pump_wavelength_nm", nm(&format!("{section}.pump_wavelength_nm"), self.pump_wavelength_nm)?),
            ],
            omega0.map(|w| 2.0 * w),
        )?;
        positive(&format!("{section}.omega_p_rad_per_fs"), wp)?;
        let dc = one_of(
            section,
            &[
                ("delta_c_rad_per_fs", self.delta_c_rad_per_fs),
                (
                    "cutoff_wavelength_nm",
                    nm(&format!("{section}.cutoff_wavelength_nm"), self.cutoff_wavelength_nm)?
                        .map(|wc| wp / 2.0 - wc),
                ),
            ],
            None,
        )?;
        let right = one_of(
            section,
            &[
                ("zone5_right_rad_per_fs", self.zone5_right_rad_per_fs),
                (
                    "limit_wavelength_nm",
                    nm(&format!("{section}.limit_wavelength_nm"), self.limit_wavelength_nm)?
                        .map(|wl| wp - wl),
                ),
            ],
            Some(0.75 * wp),
        )?;
        ZoneConfig::with_zone5_right(wp, dc, right).map_err(|e| in_section(section, e))
    }
}

impl AnalyzeSection {
    pub fn fft_options(&self, cli_zero_pad: Option<usize>) -> AppResult<FftOptions> {
        let zero_pad = cli_zero_pad.or(self.zero_pad).unwrap_or(4);
        require(zero_pad >= 1, "analyze.zero_pad", "must be >= 1")?;
        Ok(FftOptions {
            zero_pad,
            window: match self.window {
                WindowName::None => Window::None,
                WindowName::RaisedCosine => Window::RaisedCosine,
            },
        })
    }

    pub fn pump_peak_fwhm(&self) -> AppResult<f64> {
        let v = one_of(
            "analyze",
            &[
                ("pump_peak_fwhm_rad_per_fs", self.pump_peak_fwhm_rad_per_fs),
                ("pump_peak_fwhm_THz", thz(self.pump_peak_fwhm_thz)),
            ],
            Some(0.0),
        )?;
        require(v >= 0.0, "analyze.pump_peak_fwhm_rad_per_fs", "must be >= 0")?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> AppResult<RunConfig> {
        RunConfig::from_toml(s, Path::new("."))
    }

    #[test]
    fn units_are_converted() {
        let c = parse(
            "[spectrum]\npump_wavelength_nm = 405\ndelta_THz = 1\nbig_delta_THz = 50\n",
        )
        .unwrap();
        let s = c.spectrum().unwrap();
        assert!((s.omega0() - wavelength_nm_to_omega(810.0)).abs() < 1e-12);
        assert!((s.big_delta() - 2.0 * std::f64::consts::PI * 0.05).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_bandwidth_names_the_field() {
        let c = parse("[spectrum]\nomega0_rad_per_fs = 2.3\ndelta_rad_per_fs = 0.01\nbig_delta_THz = 0\n").unwrap();
        let e = c.spectrum().unwrap_err();
        assert!(e.to_string().contains("spectrum.big_delta_THz"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn conflicting_units_are_rejected() {
        let c = parse(
            "[spectrum]\nomega0_rad_per_fs = 2.3\npump_wavelength_nm = 405\ndelta_THz = 1\nbig_delta_THz = 50\n",
        )
        .unwrap();
        let e = c.spectrum().unwrap_err();
        assert!(e.to_string().contains("pump_wavelength_nm"), "{e}");
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse("[spectrum]\ndelta_thz = 1\n").unwrap_err();
        assert!(e.to_string().contains("delta_thz"), "{e}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let c = parse(
            "[spectrum]\nomega0_rad_per_fs = 2.3\ndelta_THz = 1\nbig_delta_THz = 50\n[grid]\nstart_fs = 0\nstep_fs = 1.0\npoints = 10\n",
        )
        .unwrap();
        let s = c.spectrum().unwrap();
        let h = c.sample(s.omega0()).unwrap();
        let e = c.grid(&s, &h).unwrap_err();
        assert!(e.to_string().contains("grid.step_fs"), "{e}");
    }

    #[test]
    fn zones_from_wavelengths() {
        let z = ZoneSection {
            pump_wavelength_nm: Some(405.0),
            cutoff_wavelength_nm: Some(1000.0),
            ..Default::default()
        };
        let cfg = z.build("analyze", None).unwrap();
        assert!((cfg.delta_c() - 0.4417).abs() < 2e-4);
        assert!((cfg.zone5_right() - 0.75 * cfg.omega_p()).abs() < 1e-15);
    }

    #[test]
    fn preset_with_override() {
        let c = parse("[source]\npreset = \"reference_bbo\"\nwaist_um = 10\n").unwrap();
        let p = c.source_params().unwrap();
        assert_eq!(p.waist, 10.0);
        assert_eq!(p.d_eff, SourceParams::reference_bbo().d_eff);
        let e = parse("[source]\nwaist_um = 10\n").unwrap().source_params().unwrap_err();
        assert!(e.to_string().contains("source."), "{e}");
    }
}
