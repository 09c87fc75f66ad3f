//! Parallel evaluation over τ grids.
//!
//! Every grid point is computed independently, so the output does not depend
//! on the thread count or scheduling.

use qoct_core::engine::{self, EngineOptions, Interferogram, KernelKind, TauGrid, TermValues};
use qoct_core::samples::Response;
use qoct_core::spectra::BiphotonSpectrum;
use qoct_core::Result;
use rayon::prelude::*;

/// All four engine terms at every grid point.
pub fn terms<H: Response + Sync + ?Sized>(
    grid: &TauGrid,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<Vec<TermValues>> {
    engine::check_sampling(grid.step, spec.omega0())?;
    (0..grid.len)
        .into_par_iter()
        .map(|i| engine::terms(grid.tau(i), spec, h, opts))
        .collect()
}

/// `M(τ)` on the grid.
pub fn interferogram<H: Response + Sync + ?Sized>(
    grid: &TauGrid,
    spec: &BiphotonSpectrum,
    h: &H,
    opts: &EngineOptions,
) -> Result<Interferogram> {
    let t = terms(grid, spec, h, opts)?;
    Interferogram::new(grid.start, grid.step, t.iter().map(|v| v.total()).collect(), "M")
}

/// Splits per-point terms into one interferogram per kernel kind.
pub fn series(grid: &TauGrid, values: &[TermValues], kind: KernelKind) -> Result<Interferogram> {
    let v = values
        .iter()
        .map(|t| match kind {
            KernelKind::Total => t.total(),
            k => t.get(k),
        })
        .collect();
    Interferogram::new(grid.start, grid.step, v, kind_label(kind))
}

pub fn kind_label(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::Constant => "Mc",
        KernelKind::Hom => "M0",
        KernelKind::SinglePhoton => "M1",
        KernelKind::Pump => "M2",
        KernelKind::Total => "M",
    }
}

/// Runs `f` on a pool of `threads` workers, or the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("cannot build a pool of {n} threads")),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoct_core::samples::SampleResponse;

    #[test]
    fn thread_count_does_not_change_bits() {
        let spec = BiphotonSpectrum::new(2.3, 0.01, 0.3, 0.1).unwrap();
        let h = SampleResponse::new(0.8, 4.0, 3.0, 2.3).unwrap();
        let grid = TauGrid::centered(4.0, 0.1, 9).unwrap();
        let o = EngineOptions::default();
        let a = with_threads(Some(1), || terms(&grid, &spec, &h, &o)).unwrap();
        let b = with_threads(Some(3), || terms(&grid, &spec, &h, &o)).unwrap();
        let seq: Vec<_> = grid.taus().map(|t| engine::terms(t, &spec, &h, &o).unwrap()).collect();
        assert_eq!(a, b);
        assert_eq!(a, seq);
    }
}
