use qoct_core::analytic::{Analytic, RegimeCase};
use qoct_core::engine::{self, default_grid, EngineOptions, TauGrid};
use qoct_core::samples::{Response, SampleResponse};
use qoct_core::spectra::BiphotonSpectrum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every `stride`-th point of the default grid.
fn decimated(spec: &BiphotonSpectrum, sample: &SampleResponse, stride: usize) -> TauGrid {
    let g = default_grid(spec, sample);
    TauGrid::new(g.start, g.step * stride as f64, g.len.div_ceil(stride)).unwrap()
}

fn worst_rel_error(case: RegimeCase, spec: &BiphotonSpectrum, sample: &SampleResponse, grid: &TauGrid) -> f64 {
    let a = Analytic::new(case, spec, sample).unwrap();
    let opts = EngineOptions::default();
    let r = sample.r();
    let scale = [(r * r + 1.0).powi(2), 2.0 * r * r, 4.0 * r * (r * r + 1.0), 2.0 * r * r];
    let mut worst = 0.0f64;
    for tau in grid.taus() {
        let e = engine::terms(tau, spec, sample, &opts).unwrap().as_array();
        let c = a.terms(tau).as_array();
        for k in 0..4 {
            worst = worst.max((e[k] - c[k]).abs() / scale[k]);
        }
    }
    worst
}

#[test]
fn degenerate_flat_mirror() {
    let spec = BiphotonSpectrum::degenerate(2.3, 0.01, 0.25).unwrap();
    let sample = SampleResponse::non_dispersive(0.6, 12.0, 2.3).unwrap();
    let g = decimated(&spec, &sample, 37);
    assert!(worst_rel_error(RegimeCase::DegNoDisp, &spec, &sample, &g) < 1e-6);
}

#[test]
fn nondegenerate_flat_mirror() {
    let spec = BiphotonSpectrum::new(2.1, 0.005, 0.15, 0.4).unwrap();
    let sample = SampleResponse::non_dispersive(1.0, -3.0, 2.1).unwrap();
    let g = decimated(&spec, &sample, 41);
    assert!(worst_rel_error(RegimeCase::NonDegNoDisp, &spec, &sample, &g) < 1e-6);
}

#[test]
fn dispersive_exact_forms() {
    let spec = BiphotonSpectrum::degenerate(2.3, 0.02, 0.2).unwrap();
    let sample = SampleResponse::new(0.8, 4.0, 30.0, 2.3).unwrap();
    let g = decimated(&spec, &sample, 53);
    assert!(worst_rel_error(RegimeCase::DegDispExact, &spec, &sample, &g) < 1e-5);

    let spec = BiphotonSpectrum::new(2.3, 0.02, 0.2, 0.25).unwrap();
    let g = decimated(&spec, &sample, 53);
    assert!(worst_rel_error(RegimeCase::NonDegDispExact, &spec, &sample, &g) < 1e-5);
}

#[test]
fn sample_modulus_equals_reflectivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample = SampleResponse::new(0.37, 150.0, -420.0, 2.3).unwrap();
    for _ in 0..100_000 {
        let w = rng.gen_range(0.0..10.0);
        assert!((sample.response(w).norm() - 0.37).abs() < 1e-14, "omega {w}");
    }
}
