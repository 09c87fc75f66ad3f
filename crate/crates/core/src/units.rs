//! Unit system and conversions.
//!
//! Internally every frequency is an angular frequency in rad/fs, every delay
//! is in fs and every length in μm. Reported "THz" values are ordinary
//! frequencies (cycles per ps), so `ω [rad/fs] = 2π · f [THz] · 1e-3`.

use core::f64::consts::PI;

/// Speed of light in μm/fs.
pub const C_UM_PER_FS: f64 = 0.299_792_458;

/// Speed of light in m/s.
pub const C_M_PER_S: f64 = 299_792_458.0;

/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Angular frequency (rad/fs) of an ordinary frequency given in THz.
pub fn thz_to_rad_per_fs(f_thz: f64) -> f64 {
    2.0 * PI * f_thz * 1e-3
}

/// Ordinary frequency in THz of an angular frequency in rad/fs.
pub fn rad_per_fs_to_thz(omega: f64) -> f64 {
    omega * 1e3 / (2.0 * PI)
}

/// Vacuum wavelength in nm to angular frequency in rad/fs.
pub fn wavelength_nm_to_omega(lambda_nm: f64) -> f64 {
    2.0 * PI * C_UM_PER_FS / (lambda_nm * 1e-3)
}

/// Angular frequency in rad/fs to vacuum wavelength in nm.
pub fn omega_to_wavelength_nm(omega: f64) -> f64 {
    2.0 * PI * C_UM_PER_FS / omega * 1e3
}

/// Reference-arm delay produced by a mirror displacement `z` (μm), double pass.
pub fn mirror_displacement_to_delay(z_um: f64) -> f64 {
    2.0 * z_um / C_UM_PER_FS
}

/// Mirror displacement (μm) that produces a delay `tau` (fs).
pub fn delay_to_mirror_displacement(tau_fs: f64) -> f64 {
    tau_fs * C_UM_PER_FS / 2.0
}
