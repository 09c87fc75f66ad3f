use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qoct::pipeline::{AnalysisReport, SimulateReport, SourceReport};
use qoct::{io, selftest};

fn qoct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qoct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CASE1: &str = r#"
[spectrum]
pump_wavelength_nm = 405
delta_rad_per_fs = 0.03
big_delta_rad_per_fs = 0.3

[sample]
r = 0.9
delay_fs = 0

[grid]
start_fs = -153.6
step_fs = 0.15
points = 2048
"#;

fn curves(dir: &Path) {
    let (vis, ir) = selftest::smooth_curves();
    io::write_efficiency(&dir.join("eta_vis.csv"), &vis).unwrap();
    io::write_efficiency(&dir.join("eta_ir.csv"), &ir).unwrap();
}

fn simulate_with_detection(dir: &Path, out: &str) -> Output {
    let cfg = format!(
        "{CASE1}
[simulate]
method = \"analytic\"

[simulate.detection]
eta_vis_csv = \"eta_vis.csv\"
eta_ir_csv = \"eta_ir.csv\"

[simulate.detection.zones]
pump_wavelength_nm = 405
cutoff_wavelength_nm = 1000
"
    );
    let p = write(dir, "sim.toml", &cfg);
    qoct(&["simulate", "--config", p.to_str().unwrap(), "--out", dir.join(out).to_str().unwrap()])
}

#[test]
fn nonpositive_bandwidth_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.toml",
        "[spectrum]\npump_wavelength_nm = 405\ndelta_rad_per_fs = 0.01\nbig_delta_rad_per_fs = -0.2\n",
    );
    let o = qoct(&["simulate", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("spectrum.big_delta_rad_per_fs"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_io_error() {
    let o = qoct(&["source", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn oracle_and_analytic_agree_for_case_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c2.toml",
        "[spectrum]\nomega0_rad_per_fs = 2.3\ndelta_rad_per_fs = 0.01\nbig_delta_rad_per_fs = 0.2\ndetuning_rad_per_fs = 0.3\n\
         [sample]\nr = 0.7\ndelay_fs = 5\n[grid]\nstart_fs = -15\nstep_fs = 0.15\npoints = 200\n\
         [simulate]\nmethod = \"both\"\n",
    );
    let out = dir.path().join("out");
    let o = qoct(&["simulate", "--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: SimulateReport = io::read_json(&out.join("simulate.json")).unwrap();
    assert_eq!(r.case, 2);
    let d = r.max_relative_deviation.unwrap();
    assert!(d.total < 1e-6, "{d:?}");
    for f in &r.files {
        assert!(out.join(f).is_file(), "{f}");
    }
    let ig = io::read_interferogram(&out.join("oracle_M.csv")).unwrap();
    assert_eq!(ig.len(), 200);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c3.toml",
        "[spectrum]\nomega0_rad_per_fs = 2.3\ndelta_rad_per_fs = 0.01\nbig_delta_rad_per_fs = 0.2\n\
         [sample]\nr = 0.8\ndelay_fs = 0\nkappa_fs2 = 40\n[grid]\nstart_fs = -7.5\nstep_fs = 0.15\npoints = 100\n\
         [simulate]\nmethod = \"both\"\n",
    );
    let mut runs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(name);
        let o = qoct(&["simulate", "--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(out);
    }
    let r: SimulateReport = io::read_json(&runs[0].join("simulate.json")).unwrap();
    for f in &r.files {
        assert_eq!(fs::read(runs[0].join(f)).unwrap(), fs::read(runs[1].join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_then_analyze_recovers_m0_width() {
    let dir = tempfile::tempdir().unwrap();
    curves(dir.path());
    let o = simulate_with_detection(dir.path(), "sim");
    assert!(o.status.success(), "{}", stderr(&o));

    let cfg = "[analyze]\nvis_vis_csv = \"sim/vis_vis.csv\"\nir_vis_csv = \"sim/ir_vis.csv\"\n\
               eta_vis_csv = \"eta_vis.csv\"\neta_ir_csv = \"eta_ir.csv\"\n\
               [analyze.zones]\npump_wavelength_nm = 405\ncutoff_wavelength_nm = 1000\n\
               [output]\ndir = \"ana\"\n";
    let p = write(dir.path(), "ana.toml", cfg);
    let o = qoct(&["analyze", "--config", p.to_str().unwrap(), "--zero-pad", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let out = dir.path().join("ana");
    let r: AnalysisReport = io::read_json(&out.join("analysis.json")).unwrap();
    assert_eq!(r.zero_pad, 4);
    let m0 = r.term("M0").unwrap();
    let truth = (8.0 * std::f64::consts::LN_2).sqrt() / 0.3;
    assert!((m0.fit.fwhm / truth - 1.0).abs() < 0.02, "{} vs {truth}", m0.fit.fwhm);

    // Everything written is readable again.
    for name in ["M0", "M1"] {
        io::read_spectrum(&out.join(format!("{name}_spectrum.csv"))).unwrap();
        io::read_interferogram(&out.join(format!("{name}_processed.csv"))).unwrap();
        io::read_interferogram(&out.join(format!("{name}_envelope.csv"))).unwrap();
    }
    let s = io::read_spectrum(&out.join("spectrum_vis_vis.csv")).unwrap();
    assert_eq!(s.len(), 4 * 2048);
}

#[test]
fn missing_ir_efficiency_fails() {
    let dir = tempfile::tempdir().unwrap();
    curves(dir.path());
    assert!(simulate_with_detection(dir.path(), "sim").status.success());
    fs::remove_file(dir.path().join("eta_ir.csv")).unwrap();
    let cfg = "[analyze]\nvis_vis_csv = \"sim/vis_vis.csv\"\nir_vis_csv = \"sim/ir_vis.csv\"\n\
               eta_vis_csv = \"eta_vis.csv\"\neta_ir_csv = \"eta_ir.csv\"\n\
               [analyze.zones]\npump_wavelength_nm = 405\ncutoff_wavelength_nm = 1000\n";
    let p = write(dir.path(), "ana.toml", cfg);
    let o = qoct(&["analyze", "--config", p.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("analyze.eta_ir_csv"), "{}", stderr(&o));
}

#[test]
fn source_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (name, r_detected, want) in [("unit", 375.0, 750.0), ("zero", 0.0, 0.0)] {
        let cfg = format!(
            "[source]\npreset = \"reference_bbo\"\npump_power_mW = 1\nr_detected_cps = {r_detected}\n[output]\ndir = \"{name}\"\n"
        );
        let p = write(dir.path(), &format!("{name}.toml"), &cfg);
        let o = qoct(&["source", "--config", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let r: SourceReport = io::read_json(&dir.path().join(name).join("source.json")).unwrap();
        let g = r.generated.unwrap();
        assert_eq!(g.r_generated_per_mw, want);
        if want == 0.0 {
            assert_eq!(g.s0_measured_per_thz_mw, 0.0);
        }
        assert!((r.fwhm.thz - 117.0).abs() < 1.0, "{}", r.fwhm.thz);
    }
}

#[test]
fn selftest_rejects_unknown_criterion() {
    let o = qoct(&["selftest", "--only", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qoct(&["selftest", "--only", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("criterion 2: PASS"));
}
