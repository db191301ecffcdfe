//! Physical constants (SI).

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Free-electron gyromagnetic ratio expressed as μ0·γ, m/(A·s).
pub const GAMMA_DEFAULT: f64 = 2.21e5;

/// Thermal energy kT at `temperature` kelvin.
pub fn kt(temperature: f64) -> f64 {
    K_B * temperature
}
