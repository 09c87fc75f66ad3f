//! Globally adaptive Gauss–Kronrod quadrature for vector-valued integrands.
//!
//! Every integrand returns `[f64; N]`; all components share the same
//! subdivision, so a single pass yields several related integrals (e.g. the
//! four interferogram terms plus the density mass used to scale tolerances).
//!
//! The 1D driver keeps all panels in a max-heap ordered by their largest
//! scaled error and bisects the worst one until every component meets its
//! tolerance. The 2D driver nests two 1D drivers over a rectangle.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;


use crate::error::{Error, Result};

/// 21-point Kronrod abscissae on [0, 1] (symmetric), descending.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], ...`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Number of integrand evaluations per Gauss–Kronrod panel.
pub const NODES_PER_PANEL: usize = 21;

/// Error-control settings shared by the 1D and 2D drivers.
///
/// Component `k` is accepted once its error estimate is below
/// `rel_tol * scales[k] * mass`, where `mass` is `|value[mass_index]|` when a
/// mass component is configured and `1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<const N: usize> {
    pub rel_tol: f64,
    pub scales: [f64; N],
    pub mass_index: Option<usize>,
    /// Absolute floor for every component.
    pub abs_floor: f64,
}

impl<const N: usize> Tolerance<N> {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            scales: [1.0; N],
            mass_index: None,
            abs_floor: 0.0,
        }
    }

    fn limits(&self, value: &[f64; N]) -> [f64; N] {
        let mass = match self.mass_index {
            Some(i) => value[i].abs(),
            None => 1.0,
        };
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = (self.rel_tol * self.scales[k] * mass).max(self.abs_floor);
        }
        out
    }

    fn priority(&self, error: &[f64; N]) -> f64 {
        let mut p: f64 = 0.0;
        for k in 0..N {
            let s = if self.scales[k] > 0.0 { self.scales[k] } else { 1.0 };
            p = p.max(error[k] / s);
        }
        p
    }
}

/// Subdivision of an integration interval before adaptivity starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    /// Sorted, strictly increasing points; the first and last are the bounds.
    pub breakpoints: Vec<f64>,
    /// Number of equal panels each breakpoint segment is split into.
    pub panels_per_segment: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, panels: usize) -> Self {
        Self {
            breakpoints: alloc::vec![lo, hi],
            panels_per_segment: panels.max(1),
        }
    }

    /// Adds interior breakpoints (ignored when outside `(lo, hi)`).
    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        let lo = self.breakpoints[0];
        let hi = *self.breakpoints.last().unwrap();
        for &p in points {
            if p > lo && p < hi {
                self.breakpoints.push(p);
            }
        }
        self.breakpoints.sort_by(|a, b| a.total_cmp(b));
        self.breakpoints.dedup();
        self
    }

    pub fn lo(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
    pub converged: bool,
}

impl<const N: usize> QuadResult<N> {
    /// Converts a non-converged result into [`Error::NonConvergence`] for the
    /// worst component.
    pub fn into_result(self, tol: &Tolerance<N>) -> Result<Self> {
        if self.converged {
            return Ok(self);
        }
        let limits = tol.limits(&self.value);
        let mut worst = 0;
        let mut ratio = f64::NEG_INFINITY;
        for k in 0..N {
            let r = self.error[k] / limits[k].max(f64::MIN_POSITIVE);
            if r > ratio {
                ratio = r;
                worst = k;
            }
        }
        Err(Error::NonConvergence {
            estimate: self.value[worst],
            error: self.error[worst],
            requested: limits[worst],
        })
    }
}

/// One Gauss–Kronrod 21 panel: (Kronrod value, error estimate).
pub fn gk21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [[0.0; N]; 21];
    fv[10] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = f(center - dx);
        fv[20 - j] = f(center + dx);
    }

    let mut kron = [0.0; N];
    let mut err = [0.0; N];
    for k in 0..N {
        let mut rk = WGK[10] * fv[10][k];
        let mut rg = 0.0;
        for j in 0..10 {
            let s = fv[j][k] + fv[20 - j][k];
            rk += WGK[j] * s;
            if j % 2 == 1 {
                rg += WG[j / 2] * s;
            }
        }
        let mean = 0.5 * rk;
        let mut asc = WGK[10] * (fv[10][k] - mean).abs();
        for j in 0..10 {
            asc += WGK[j] * ((fv[j][k] - mean).abs() + (fv[20 - j][k] - mean).abs());
        }
        let resasc = asc * half.abs();
        let mut e = ((rk - rg) * half).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        let resabs = {
            let mut s = WGK[10] * fv[10][k].abs();
            for j in 0..10 {
                s += WGK[j] * (fv[j][k].abs() + fv[20 - j][k].abs());
            }
            s * half.abs()
        };
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs);
        }
        kron[k] = rk * half;
        err[k] = e;
    }
    (kron, err)
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive 1D integration of `f` over `axis`.
///
/// `max_panels` bounds the total number of panels; the result reports
/// `converged == false` when the bound is hit or panels become too narrow
/// to split.
pub fn integrate<const N: usize, F>(
    mut f: F,
    axis: &Axis,
    tol: &Tolerance<N>,
    max_panels: usize,
) -> QuadResult<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let mut heap: BinaryHeap<Panel<N>> = BinaryHeap::new();
    let mut total = [0.0; N];
    let mut total_err = [0.0; N];
    let mut evaluations = 0;

    let n = axis.panels_per_segment.max(1);
    for seg in axis.breakpoints.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let h = (hi - lo) / n as f64;
        for i in 0..n {
            let a = lo + h * i as f64;
            let b = if i + 1 == n { hi } else { lo + h * (i + 1) as f64 };
            let (value, error) = gk21(&mut f, a, b);
            evaluations += NODES_PER_PANEL;
            for k in 0..N {
                total[k] += value[k];
                total_err[k] += error[k];
            }
            heap.push(Panel {
                a,
                b,
                value,
                error,
                priority: tol.priority(&error),
            });
        }
    }

    let mut converged = false;
    loop {
        let limits = tol.limits(&total);
        if (0..N).all(|k| total_err[k] <= limits[k]) {
            converged = true;
            break;
        }
        if heap.len() >= max_panels {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 2 * NODES_PER_PANEL;
        for k in 0..N {
            total[k] += v1[k] + v2[k] - worst.value[k];
            total_err[k] += e1[k] + e2[k] - worst.error[k];
        }
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            priority: tol.priority(&e1),
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            priority: tol.priority(&e2),
        });
    }

    // Re-sum in interval order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in &panels {
        for k in 0..N {
            value[k] += p.value[k];
            error[k] += p.error[k];
        }
    }
    if !converged {
        let limits = tol.limits(&value);
        converged = (0..N).all(|k| error[k] <= limits[k]);
    }
    QuadResult {
        value,
        error,
        evaluations,
        converged,
    }
}

/// Limits for the nested 2D driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedLimits {
    pub max_outer_panels: usize,
    pub max_inner_panels: usize,
    /// Inner tolerance as a fraction of the outer relative tolerance.
    pub inner_tightening: f64,
}

impl Default for NestedLimits {
    fn default() -> Self {
        Self {
            max_outer_panels: 4000,
            max_inner_panels: 400,
            inner_tightening: 0.1,
        }
    }
}

/// Nested adaptive integration over the rectangle `outer × inner`.
///
/// The inner integral at each outer node uses the same tolerance structure as
/// the outer one, tightened by `limits.inner_tightening`. Inner failures are
/// folded into the reported error and clear `converged`.
pub fn integrate_2d<const N: usize, F>(
    mut f: F,
    outer: &Axis,
    inner: &Axis,
    tol: &Tolerance<N>,
    limits: NestedLimits,
) -> QuadResult<N>
where
    F: FnMut(f64, f64) -> [f64; N],
{
    let inner_tol = Tolerance {
        rel_tol: tol.rel_tol * limits.inner_tightening,
        ..*tol
    };
    let mut inner_ok = true;
    let mut inner_evals = 0;
    let mut outer_result = integrate(
        |x| {
            let r = integrate(|y| f(x, y), inner, &inner_tol, limits.max_inner_panels);
            inner_evals += r.evaluations;
            inner_ok &= r.converged;
            r.value
        },
        outer,
        tol,
        limits.max_outer_panels,
    );
    outer_result.evaluations = inner_evals;
    outer_result.converged &= inner_ok;
    outer_result
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gk21_exact_for_high_degree_polynomials() {
        let mut f = |x: f64| [x.powi(30), x.powi(18)];
        let (v, _) = gk21(&mut f, -1.0, 1.0);
        assert!((v[0] - 2.0 / 31.0).abs() < 1e-15);
        assert!((v[1] - 2.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_gaussian() {
        let axis = Axis::new(-10.0, 10.0, 1);
        let r = integrate(|x| [(-x * x).exp()], &axis, &Tolerance::relative(1e-13), 200);
        assert!(r.converged);
        assert!((r.value[0] - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫ exp(-x²) cos(40x) dx = √π exp(-400)
        let axis = Axis::new(-9.0, 9.0, 4);
        let tol = Tolerance {
            rel_tol: 1e-12,
            scales: [1.0, 1.0],
            mass_index: Some(1),
            abs_floor: 0.0,
        };
        let r = integrate(
            |x| {
                let g = (-x * x).exp();
                [g * (40.0 * x).cos(), g]
            },
            &axis,
            &tol,
            1000,
        );
        assert!(r.converged);
        assert!(r.value[0].abs() < 1e-11);
        assert!((r.value[1] - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let axis = Axis::new(0.0, 1.0, 1);
        let tol = Tolerance::relative(1e-15);
        let r = integrate(|x: f64| [(1.0 / (x + 1e-12)).sin()], &axis, &tol, 3);
        assert!(!r.converged);
        assert!(matches!(
            r.into_result(&tol),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn nested_separable_gaussian() {
        let outer = Axis::new(-8.0, 8.0, 2);
        let inner = Axis::new(-8.0, 8.0, 2);
        let tol = Tolerance::relative(1e-11);
        let r = integrate_2d(
            |x, y| [(-(x * x) - 2.0 * y * y).exp()],
            &outer,
            &inner,
            &tol,
            NestedLimits::default(),
        );
        assert!(r.converged);
        let exact = PI / 2f64.sqrt();
        assert!((r.value[0] - exact).abs() < 1e-11);
    }

    #[test]
    fn breakpoints_are_sorted_and_clipped() {
        let a = Axis::new(0.0, 1.0, 1).with_breakpoints(&[0.7, -1.0, 0.2, 2.0, 0.7]);
        assert_eq!(a.breakpoints, alloc::vec![0.0, 0.2, 0.7, 1.0]);
    }
}
