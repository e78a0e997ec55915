//! Physical constants and unit helpers.

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_8128e-12;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Free-space impedance (ohms).
pub const Z0: f64 = 376.730_313_668;

pub const fn nm(v: f64) -> f64 {
    v * 1e-9
}

pub const fn um(v: f64) -> f64 {
    v * 1e-6
}

/// Vacuum wavenumber 2*pi/lambda (1/m).
pub fn k0(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength
}

/// Frequency (Hz) of a vacuum wavelength (m).
pub fn freq_of_wavelength(wavelength: f64) -> f64 {
    C0 / wavelength
}
