//! Sample-arm response functions.

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::units::C_UM_PER_FS;

/// A complex reflection response `H(ω)` of the sample arm.
///
/// The hints let the quadrature engine size its initial subdivision; they do
/// not affect the value of any integral. Closures get zero hints.
pub trait Response {
    fn response(&self, omega: f64) -> Complex64;

    /// `H(ω)·e^{−iωτ}`. Implementors may fold the delay into a single phase.
    fn response_delayed(&self, omega: f64, tau: f64) -> Complex64 {
        self.response(omega) * Complex64::from_polar(1.0, -omega * tau)
    }

    /// Approximate group delay of the response (fs).
    fn delay_hint(&self) -> f64 {
        0.0
    }

    /// Approximate quadratic spectral-phase coefficient (fs²).
    fn chirp_hint(&self) -> f64 {
        0.0
    }

    /// Upper bound of `|H(ω)|`.
    fn magnitude_bound(&self) -> f64 {
        1.0
    }
}

impl<F> Response for F
where
    F: Fn(f64) -> Complex64,
{
    fn response(&self, omega: f64) -> Complex64 {
        self(omega)
    }
}

/// Single reflecting layer: `H(ω) = r·exp(i[ωT + κ(ω − ω₀)²])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleResponse {
    r: f64,
    delay: f64,
    kappa: f64,
    omega0: f64,
}

impl SampleResponse {
    /// `r` amplitude reflectivity, `delay` group delay `T` (fs), `kappa`
    /// dispersion coefficient `κ` (fs²), `omega0` expansion centre (rad/fs).
    pub fn new(r: f64, delay: f64, kappa: f64, omega0: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&r), "r", r, "0 <= r <= 1")?;
        ensure(delay.is_finite(), "delay", delay, "finite")?;
        ensure(kappa.is_finite(), "kappa", kappa, "finite")?;
        ensure(omega0 > 0.0 && omega0.is_finite(), "omega0", omega0, "> 0")?;
        Ok(Self {
            r,
            delay,
            kappa,
            omega0,
        })
    }

    /// Dispersion-free reflector, `H(ω) = r·exp(iωT)`.
    pub fn non_dispersive(r: f64, delay: f64, omega0: f64) -> Result<Self> {
        Self::new(r, delay, 0.0, omega0)
    }

    /// Builds the response of a glass layer from its index expansion
    /// `n(ω) = n₀ + η(ω − ω₀)`, dropping the constant phase `−(d/c)ηω₀²`.
    pub fn from_material(layer: &MaterialLayer, r: f64, omega0: f64) -> Result<Self> {
        let scale = layer.thickness / C_UM_PER_FS;
        let delay = scale * (layer.n0 + layer.dn_domega * omega0);
        let kappa = scale * layer.dn_domega;
        Self::new(r, delay, kappa, omega0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Intensity reflectivity `R = r²`.
    pub fn reflectivity(&self) -> f64 {
        self.r * self.r
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.r, self.delay, kappa, self.omega0)
    }
}

impl Response for SampleResponse {
    fn response(&self, omega: f64) -> Complex64 {
        let d = omega - self.omega0;
        Complex64::from_polar(self.r, omega * self.delay + self.kappa * d * d)
    }

    fn response_delayed(&self, omega: f64, tau: f64) -> Complex64 {
        let d = omega - self.omega0;
        Complex64::from_polar(self.r, omega * (self.delay - tau) + self.kappa * d * d)
    }

    fn delay_hint(&self) -> f64 {
        self.delay
    }

    fn chirp_hint(&self) -> f64 {
        self.kappa
    }

    fn magnitude_bound(&self) -> f64 {
        self.r
    }
}

/// A homogeneous dispersive layer.
///
/// `thickness` is in μm, `n0` is the index at `ω₀` and `dn_domega` is
/// `η = ∂n/∂ω` at `ω₀` in fs/rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialLayer {
    pub thickness: f64,
    pub n0: f64,
    pub dn_domega: f64,
}

impl MaterialLayer {
    pub fn new(thickness: f64, n0: f64, dn_domega: f64) -> Result<Self> {
        ensure(
            thickness > 0.0 && thickness.is_finite(),
            "thickness",
            thickness,
            "> 0",
        )?;
        ensure(n0 >= 1.0 && n0.is_finite(), "n0", n0, ">= 1")?;
        ensure(dn_domega.is_finite(), "dn_domega", dn_domega, "finite")?;
        Ok(Self {
            thickness,
            n0,
            dn_domega,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn identity_reflector() {
        let s = SampleResponse::new(1.0, 0.0, 0.0, 2.3).unwrap();
        for w in [0.1, 2.3, 7.0] {
            assert!(close(s.response(w), Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn delayed_partial_reflector() {
        let s = SampleResponse::non_dispersive(0.8, 10.0, 2.3).unwrap();
        let expected = Complex64::from_polar(0.8, 20.0);
        assert!(close(s.response(2.0), expected, 1e-14));
    }

    #[test]
    fn quadratic_phase() {
        let s = SampleResponse::new(1.0, 0.0, 100.0, 2.3).unwrap();
        let expected = Complex64::from_polar(1.0, 1.0);
        assert!(close(s.response(2.3 + 0.1), expected, 1e-12));
    }

    #[test]
    fn dispersionless_glass() {
        let layer = MaterialLayer::new(2000.0, 1.5, 0.0).unwrap();
        let s = SampleResponse::from_material(&layer, 1.0, 2.3).unwrap();
        assert!((s.delay() - 2000.0 * 1.5 / C_UM_PER_FS).abs() < 1e-9);
        assert!((s.delay() - 10_007.0).abs() < 1.0);
        assert_eq!(s.kappa(), 0.0);
    }

    #[test]
    fn dispersive_glass_kappa() {
        let layer = MaterialLayer::new(2000.0, 1.5, 0.02).unwrap();
        let s = SampleResponse::from_material(&layer, 1.0, 2.3).unwrap();
        assert!((s.kappa() - 2000.0 * 0.02 / C_UM_PER_FS).abs() < 1e-9);
        assert!((s.delay() - 2000.0 * (1.5 + 0.02 * 2.3) / C_UM_PER_FS).abs() < 1e-9);
    }

    #[test]
    fn significant_dispersion_fixture() {
        // κΔ² = 10 at Δ = 0.2 rad/fs.
        let kappa = 10.0 / (0.2f64 * 0.2);
        assert!((kappa - 250.0).abs() < 1e-9);
        let eta = kappa * C_UM_PER_FS / 1000.0;
        let layer = MaterialLayer::new(1000.0, 1.5, eta).unwrap();
        let s = SampleResponse::from_material(&layer, 1.0, 2.3).unwrap();
        assert!((s.kappa() - 250.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_reflectivity_and_layer() {
        assert!(SampleResponse::new(1.2, 0.0, 0.0, 2.3).is_err());
        assert!(SampleResponse::new(-0.1, 0.0, 0.0, 2.3).is_err());
        assert!(MaterialLayer::new(0.0, 1.5, 0.0).is_err());
        assert!(MaterialLayer::new(10.0, 0.9, 0.0).is_err());
    }

    #[test]
    fn kappa_zero_is_non_dispersive() {
        let a = SampleResponse::new(0.7, 12.0, 0.0, 2.3).unwrap();
        let b = SampleResponse::non_dispersive(0.7, 12.0, 2.3).unwrap();
        for w in [1.0, 2.0, 3.0] {
            assert_eq!(a.response(w), b.response(w));
        }
    }

    #[test]
    fn delayed_response_matches_product() {
        let s = SampleResponse::new(0.9, 37.0, 120.0, 2.3).unwrap();
        let f = |w: f64| s.response(w);
        for (w, t) in [(2.0, 10.0), (2.6, -55.0), (2.3, 37.0)] {
            assert!(close(s.response_delayed(w, t), f.response_delayed(w, t), 1e-12));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn modulus_equals_r(
            w in 0.0f64..10.0, r in 0.0f64..=1.0, t in -1e4f64..1e4, k in -500.0f64..500.0,
        ) {
            let s = SampleResponse::new(r, t, k, 2.3).unwrap();
            prop_assert!((s.response(w).norm() - r).abs() < 1e-14);
        }
    }
}
