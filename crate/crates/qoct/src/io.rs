//! CSV and JSON file formats.
//!
//! Interferograms: header `tau_fs,value` (or `z_um,value` for mirror
//! displacement, converted with `τ = 2z/c`). Efficiency curves:
//! `wavelength_nm,efficiency`. Spectra: every DFT bin in transform order,
//! `omega_rad_per_fs,frequency_THz,re,im,abs`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qoct_core::dsp::{ComplexSpectrum, EfficiencyCurve};
use qoct_core::engine::Interferogram;
use qoct_core::units::{mirror_displacement_to_delay, omega_to_wavelength_nm, rad_per_fs_to_thz};
use qoct_core::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{AppError, AppResult};

const UNIFORM_TOL: f64 = 1e-6;

fn reader(path: &Path) -> AppResult<csv::Reader<File>> {
    let f = File::open(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f))
}

fn csv_err(path: &Path, e: csv::Error) -> AppError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => AppError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        AppError::format(path, e.to_string())
    }
}

fn headers(path: &Path, r: &mut csv::Reader<File>) -> AppResult<Vec<String>> {
    Ok(r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_owned)
        .collect())
}

fn rows(path: &Path, r: &mut csv::Reader<File>, width: usize) -> AppResult<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != width {
            return Err(AppError::format(
                path,
                format!("row {}: expected {width} columns, found {}", i + 2, rec.len()),
            ));
        }
        let mut row = Vec::with_capacity(width);
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| {
                AppError::format(path, format!("row {}: `{field}` is not a number", i + 2))
            })?;
            if !v.is_finite() {
                return Err(AppError::format(path, format!("row {}: non-finite value", i + 2)));
            }
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

fn create(path: &Path) -> AppResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>, body: &str) -> AppResult<()> {
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| AppError::io(path, e))
}

/// Reads an interferogram; the delay grid must be uniform.
pub fn read_interferogram(path: &Path) -> AppResult<Interferogram> {
    let mut r = reader(path)?;
    let h = headers(path, &mut r)?;
    let in_um = match h.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["tau_fs", "value"] => false,
        ["z_um", "value"] => true,
        _ => {
            return Err(AppError::format(
                path,
                format!("header must be `tau_fs,value` or `z_um,value`, found `{}`", h.join(",")),
            ))
        }
    };
    let data = rows(path, &mut r, 2)?;
    if data.len() < 2 {
        return Err(AppError::format(path, "need at least two samples"));
    }
    let tau = |row: &Vec<f64>| {
        if in_um {
            mirror_displacement_to_delay(row[0])
        } else {
            row[0]
        }
    };
    let n = data.len();
    let t0 = tau(&data[0]);
    let step = (tau(&data[n - 1]) - t0) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(AppError::format(path, "delays must increase"));
    }
    for (i, row) in data.iter().enumerate() {
        let expect = t0 + i as f64 * step;
        if (tau(row) - expect).abs() > UNIFORM_TOL * step {
            return Err(AppError::format(
                path,
                format!("non-uniform delay grid at row {}", i + 2),
            ));
        }
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Interferogram::new(
        t0,
        step,
        data.into_iter().map(|r| r[1]).collect(),
        label,
    )?)
}

pub fn write_interferogram(path: &Path, ig: &Interferogram) -> AppResult<()> {
    let w = create(path)?;
    let mut body = String::from("tau_fs,value\n");
    for (t, v) in ig.taus().zip(ig.values()) {
        body.push_str(&format!("{t},{v}\n"));
    }
    finish(path, w, &body)
}

/// Reads `wavelength_nm,efficiency` rows in any order.
pub fn read_efficiency(path: &Path) -> AppResult<EfficiencyCurve> {
    let mut r = reader(path)?;
    let h = headers(path, &mut r)?;
    if h != ["wavelength_nm", "efficiency"] {
        return Err(AppError::format(
            path,
            format!("header must be `wavelength_nm,efficiency`, found `{}`", h.join(",")),
        ));
    }
    let pts: Vec<(f64, f64)> = rows(path, &mut r, 2)?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect();
    EfficiencyCurve::from_wavelengths(&pts).map_err(|e| AppError::format(path, e.to_string()))
}

/// Writes the curve's own samples, in increasing wavelength.
pub fn write_efficiency(path: &Path, curve: &EfficiencyCurve) -> AppResult<()> {
    let w = create(path)?;
    let mut body = String::from("wavelength_nm,efficiency\n");
    let pts: Vec<(f64, f64)> = curve.samples().collect();
    for (omega, eta) in pts.iter().rev() {
        body.push_str(&format!("{},{eta}\n", omega_to_wavelength_nm(*omega)));
    }
    finish(path, w, &body)
}

pub fn write_spectrum(path: &Path, spec: &ComplexSpectrum) -> AppResult<()> {
    let w = create(path)?;
    let mut body = String::from("omega_rad_per_fs,frequency_THz,re,im,abs\n");
    for (k, v) in spec.values().iter().enumerate() {
        let om = spec.frequency(k);
        body.push_str(&format!(
            "{om},{},{},{},{}\n",
            rad_per_fs_to_thz(om),
            v.re,
            v.im,
            v.norm()
        ));
    }
    finish(path, w, &body)
}

/// Reads a spectrum written by [`write_spectrum`].
///
/// The source interferogram length is not stored, so the result reports the
/// full transform length with a zero-pad factor of one.
pub fn read_spectrum(path: &Path) -> AppResult<ComplexSpectrum> {
    let mut r = reader(path)?;
    let h = headers(path, &mut r)?;
    if h != ["omega_rad_per_fs", "frequency_THz", "re", "im", "abs"] {
        return Err(AppError::format(
            path,
            format!("unexpected spectrum header `{}`", h.join(",")),
        ));
    }
    let data = rows(path, &mut r, 5)?;
    if data.len() < 2 {
        return Err(AppError::format(path, "need at least two bins"));
    }
    let n = data.len();
    let step = data[1][0] - data[0][0];
    if data[0][0] != 0.0 || !(step > 0.0) {
        return Err(AppError::format(path, "bin 0 must be at ω = 0 with increasing bins"));
    }
    let tau_step = 2.0 * std::f64::consts::PI / (n as f64 * step);
    let values = data.iter().map(|r| Complex64::new(r[2], r[3])).collect();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(ComplexSpectrum::from_dft(values, 0.0, tau_step, n, 1, label)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let w = create(path)?;
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::format(path, e.to_string()))?;
    body.push('\n');
    finish(path, w, &body)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::format(path, e.to_string()))
}
