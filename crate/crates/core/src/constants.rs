//! Physical constants and ⁸⁵Rb atomic data.
//!
//! Everything here is a compile-time literal. SI units throughout.

use std::f64::consts::PI;

use crate::error::{ensure, Result};

/// CODATA 2018 values. `H` is derived from `HBAR` so that `h = 2π ħ` holds
/// to the last bit.
pub struct PhysicalConstants;

impl PhysicalConstants {
    /// Speed of light in vacuum (m/s).
    pub const C: f64 = 299_792_458.0;
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Planck constant (J s).
    pub const H: f64 = 2.0 * PI * Self::HBAR;
    /// Boltzmann constant (J/K).
    pub const KB: f64 = 1.380_649e-23;
    /// Vacuum permittivity (F/m).
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    /// Standard gravitational acceleration (m/s²).
    pub const G: f64 = 9.806_65;
    /// Atomic mass unit (kg).
    pub const AMU: f64 = 1.660_539_066_60e-27;
}

/// An atomic species with the two alkali D lines that dominate the
/// far-detuned dipole potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species {
    /// Atomic mass (kg).
    pub mass: f64,
    /// D2 wavelength (m).
    pub lambda_d2: f64,
    /// D1 wavelength (m).
    pub lambda_d1: f64,
    /// D2 natural linewidth Γ (rad/s).
    pub gamma_natural: f64,
    /// Relative dipole weights of (D2, D1); they sum to one.
    pub line_strengths: [f64; 2],
}

/// ⁸⁵Rb with the tabulated D-line data.
pub const RB85: Species = Species {
    mass: 84.911_789_738 * PhysicalConstants::AMU,
    lambda_d2: 780.241_368e-9,
    lambda_d1: 794.979_015e-9,
    gamma_natural: 2.0 * PI * 6.0666e6,
    line_strengths: [2.0 / 3.0, 1.0 / 3.0],
};

impl Species {
    pub fn rb85() -> Self {
        RB85
    }

    /// Species with an arbitrary mass and ⁸⁵Rb line data.
    pub fn with_mass(mass: f64) -> Self {
        Species { mass, ..RB85 }
    }

    /// Reduced mass for a collision between two identical atoms.
    pub fn reduced_mass(&self) -> f64 {
        self.mass / 2.0
    }

    /// Root-mean-square speed √(3 k_B T / m).
    pub fn thermal_velocity(&self, temperature: f64) -> Result<f64> {
        ensure(temperature >= 0.0, || {
            format!("temperature must be non-negative, got {temperature} K")
        })?;
        Ok((3.0 * PhysicalConstants::KB * temperature / self.mass).sqrt())
    }

    /// Thermal de Broglie wavelength h / √(2π m k_B T).
    pub fn thermal_de_broglie(&self, temperature: f64) -> Result<f64> {
        ensure(temperature > 0.0, || {
            format!("temperature must be positive, got {temperature} K")
        })?;
        Ok(PhysicalConstants::H
            / (2.0 * PI * self.mass * PhysicalConstants::KB * temperature).sqrt())
    }

    /// Recoil frequency ħk²/(4π m) in Hz for light of wavelength `lambda`.
    pub fn recoil_frequency(&self, lambda: f64) -> f64 {
        let k = 2.0 * PI / lambda;
        PhysicalConstants::HBAR * k * k / (4.0 * PI * self.mass)
    }

    /// Natural linewidth Γ/2π in Hz.
    pub fn linewidth_hz(&self) -> f64 {
        self.gamma_natural / (2.0 * PI)
    }
}

/// Convert a temperature-equivalent in μK to an energy in J.
pub fn uk_to_joule(micro_kelvin: f64) -> f64 {
    micro_kelvin * 1e-6 * PhysicalConstants::KB
}

/// Convert an energy in J to its temperature-equivalent in μK.
pub fn joule_to_uk(energy: f64) -> f64 {
    energy / PhysicalConstants::KB * 1e6
}

/// cm³/s → m³/s.
pub fn cm3_to_m3(x: f64) -> f64 {
    x * 1e-6
}

/// m³/s → cm³/s.
pub fn m3_to_cm3(x: f64) -> f64 {
    x * 1e6
}

/// cm⁻³ → m⁻³.
pub fn per_cm3_to_per_m3(x: f64) -> f64 {
    x * 1e6
}

/// m⁻³ → cm⁻³.
pub fn per_m3_to_per_cm3(x: f64) -> f64 {
    x * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn codata_literals() {
        assert!(rel(PhysicalConstants::C, 2.997_924_58e8) < 1e-9);
        assert!(rel(PhysicalConstants::HBAR, 1.054_571_8e-34) < 1e-6);
        assert!(rel(PhysicalConstants::H, 6.626_070_15e-34) < 1e-8);
        assert!(rel(PhysicalConstants::KB, 1.380_649e-23) < 1e-9);
        assert!(rel(PhysicalConstants::EPS0, 8.854_187_8e-12) < 1e-6);
        assert!(rel(PhysicalConstants::G, 9.806_65) < 1e-9);
        assert_eq!(PhysicalConstants::H, 2.0 * PI * PhysicalConstants::HBAR);
    }

    #[test]
    fn species_invariants() {
        let rb = Species::rb85();
        assert!(rb.mass > 0.0);
        assert!(rb.lambda_d1 > rb.lambda_d2);
        assert!((rb.line_strengths.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(rel(rb.linewidth_hz(), 6.07e6) < 1e-3);
    }

    #[test]
    fn reduced_mass_examples() {
        let u = PhysicalConstants::AMU;
        assert_eq!(Species::with_mass(85.0 * u).reduced_mass(), 42.5 * u);
        assert_eq!(Species::with_mass(2.0).reduced_mass(), 1.0);
        assert_eq!(Species::with_mass(87.0 * u).reduced_mass(), 43.5 * u);
    }

    #[test]
    fn thermal_velocity_examples() {
        let rb = Species::rb85();
        assert_eq!(rb.thermal_velocity(0.0).unwrap(), 0.0);
        let v = rb.thermal_velocity(123e-6).unwrap();
        assert!((v - 0.190).abs() < 5e-4, "{v}");
        let v4 = rb.thermal_velocity(4.0 * 123e-6).unwrap();
        assert!(rel(v4, 2.0 * v) < 1e-15);
        assert!(rb.thermal_velocity(-1e-6).is_err());
    }

    #[test]
    fn velocity_round_trips_temperature() {
        let rb = Species::rb85();
        for t in [1e-7, 38e-6, 123e-6, 1e-3, 300.0] {
            let v = rb.thermal_velocity(t).unwrap();
            let back = v * v * rb.mass / (3.0 * PhysicalConstants::KB);
            assert!(rel(back, t) < 1e-12);
        }
    }

    #[test]
    fn de_broglie_examples() {
        let rb = Species::rb85();
        let l = rb.thermal_de_broglie(123e-6).unwrap();
        assert!(rel(l, 1.71e-8) < 5e-3, "{l}");
        let l38 = rb.thermal_de_broglie(38e-6).unwrap();
        assert!(rel(l38, 3.07e-8) < 5e-3, "{l38}");
        let l4 = rb.thermal_de_broglie(4.0 * 123e-6).unwrap();
        assert!(rel(l4, l / 2.0) < 1e-14);
        assert!(rb.thermal_de_broglie(0.0).is_err());
    }

    #[test]
    fn recoil_frequency_near_3p8_khz() {
        let nu = Species::rb85().recoil_frequency(787.6e-9);
        assert!((nu - 3.8e3).abs() < 0.1e3, "{nu}");
    }
}
