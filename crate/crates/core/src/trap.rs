//! Dipole-trap parameters and the density model of the loaded lattice.
//!
//! # Density model
//!
//! The lattice is a 1-D standing wave along `z` with wells spaced by `λ/2`.
//! Well populations follow a Gaussian envelope of width `σ_env` along `z`,
//! so the central well holds
//!
//! ```text
//! N_c = N · (λ/2) / (√(2π) σ_env)
//! ```
//!
//! atoms. Inside a well the atoms are thermal in the harmonic
//! approximation, with per-well widths `σ_i = √(k_B T / m) / (2π ν_i)`.
//! The peak density is the centre of the central well:
//!
//! ```text
//! ρ_peak = N_c / ((2π)^{3/2} σ_x σ_y σ_z)
//! ```
//!
//! For `∫ρ² d³r` the lattice convention `N ρ_peak / 4` is used, which is the
//! normalisation behind `ξ = β ρ_peak / (4γ)`. The single-Gaussian value
//! `N ρ_peak / 2^{3/2}` is kept as [`DensityConvention::SingleGaussian`].
//!
//! Gravitational sag along the vertical lattice axis is neglected; the axial
//! confinement is several hundred kHz.

use std::f64::consts::PI;

use crate::constants::{PhysicalConstants, Species};
use crate::error::{ensure, Error, Result};

/// Signed dipole potential and photon scattering rate at a given intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleResponse {
    /// Potential energy at the intensity maximum (J); negative means
    /// attractive (red detuning).
    pub potential: f64,
    /// Spontaneous scattering rate (1/s).
    pub scattering_rate: f64,
}

impl DipoleResponse {
    /// Trap depth, positive for an attractive potential.
    pub fn depth(&self) -> f64 {
        -self.potential
    }
}

/// Minimum |Δ|/Γ for which the far-detuned two-line model is accepted.
pub const MIN_DETUNING_LINEWIDTHS: f64 = 100.0;

/// Far-off-resonance dipole potential summed over the D2 and D1 lines with
/// the species' line strengths.
///
/// Per line: `U = s (3πc²Γ / 2ω₀³) I/Δ` and `Γ_sc = (Γ/ħΔ) |U|`, with
/// `Δ = ω_L − ω₀`.
pub fn dipole_depth_and_scatter(
    intensity_peak: f64,
    laser_wavelength: f64,
    species: &Species,
) -> Result<DipoleResponse> {
    ensure(intensity_peak >= 0.0, || "intensity must be non-negative".into())?;
    ensure(laser_wavelength > 0.0, || "laser wavelength must be positive".into())?;
    let c = PhysicalConstants::C;
    let gamma = species.gamma_natural;
    let omega_l = 2.0 * PI * c / laser_wavelength;
    let mut potential = 0.0;
    let mut scattering = 0.0;
    for (lambda, strength) in [species.lambda_d2, species.lambda_d1].into_iter().zip(species.line_strengths) {
        if strength == 0.0 {
            continue;
        }
        let omega0 = 2.0 * PI * c / lambda;
        let detuning = omega_l - omega0;
        if detuning.abs() < MIN_DETUNING_LINEWIDTHS * gamma {
            return Err(Error::InvalidInput(format!(
                "laser at {laser_wavelength} m is within {MIN_DETUNING_LINEWIDTHS} linewidths of the line at {lambda} m"
            )));
        }
        let u = strength * 3.0 * PI * c * c * gamma / (2.0 * omega0.powi(3)) * intensity_peak / detuning;
        potential += u;
        scattering += gamma / (PhysicalConstants::HBAR * detuning.abs()) * u.abs();
    }
    Ok(DipoleResponse { potential, scattering_rate: scattering })
}

/// Real ground-state polarizability (SI, C·m²/V) implied by the dipole
/// model: `U = −α I / (2 ε₀ c)`.
pub fn polarizability(laser_wavelength: f64, species: &Species) -> Result<f64> {
    let unit = dipole_depth_and_scatter(1.0, laser_wavelength, species)?;
    Ok(-2.0 * PhysicalConstants::EPS0 * PhysicalConstants::C * unit.potential)
}

/// Peak intensity of the standing wave formed by two counter-propagating
/// travelling modes of equal power: four times the single-beam peak.
pub fn lattice_peak_intensity(power_per_mode: f64, waist_sagittal: f64, waist_transversal: f64) -> f64 {
    4.0 * 2.0 * power_per_mode / (PI * waist_sagittal * waist_transversal)
}

/// Axial and radial harmonic frequencies (Hz) of a lattice well:
/// `ν_a = (1/λ)√(2U₀/m)`, `ν_r = (1/2π)√(4U₀/(m w₀²))`.
pub fn secular_frequencies(depth: f64, laser_wavelength: f64, waist: f64, species: &Species) -> Result<(f64, f64)> {
    ensure(depth > 0.0, || format!("well depth must be positive, got {depth}"))?;
    ensure(waist > 0.0 && laser_wavelength > 0.0, || "waist and wavelength must be positive".into())?;
    let m = species.mass;
    let axial = (2.0 * depth / m).sqrt() / laser_wavelength;
    let radial = (4.0 * depth / (m * waist * waist)).sqrt() / (2.0 * PI);
    Ok((axial, radial))
}

/// Inverse of the axial branch of [`secular_frequencies`].
pub fn depth_from_axial_frequency(axial: f64, laser_wavelength: f64, species: &Species) -> f64 {
    let v = axial * laser_wavelength;
    species.mass * v * v / 2.0
}

/// Depth and frequencies of one lattice configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParameters {
    /// U₀ (J).
    pub well_depth: f64,
    pub lattice_wavelength: f64,
    /// Effective waist √(w_s w_t) (m).
    pub waist: f64,
    pub axial_frequency: f64,
    pub radial_frequency: f64,
    /// Model scattering rate at this depth (1/s).
    pub scattering_rate: f64,
}

impl TrapParameters {
    /// Derive frequencies and the model scattering rate from the depth.
    pub fn from_depth(depth: f64, lattice_wavelength: f64, waist: f64, species: &Species) -> Result<Self> {
        let (axial, radial) = secular_frequencies(depth, lattice_wavelength, waist, species)?;
        let unit = dipole_depth_and_scatter(1.0, lattice_wavelength, species)?;
        ensure(unit.potential < 0.0, || {
            format!("laser at {lattice_wavelength} m gives a repulsive lattice")
        })?;
        let scattering_rate = depth / unit.depth() * unit.scattering_rate;
        Ok(TrapParameters {
            well_depth: depth,
            lattice_wavelength,
            waist,
            axial_frequency: axial,
            radial_frequency: radial,
            scattering_rate,
        })
    }

    pub fn depth_uk(&self) -> f64 {
        crate::constants::joule_to_uk(self.well_depth)
    }

    pub fn well_spacing(&self) -> f64 {
        self.lattice_wavelength / 2.0
    }
}

/// Confinement regime flags; all comparisons are strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    pub lamb_dicke_axial: bool,
    pub lamb_dicke_radial: bool,
    pub strong_confinement_axial: bool,
    pub strong_confinement_radial: bool,
}

pub fn classify_frequencies(axial: f64, radial: f64, lattice_wavelength: f64, species: &Species) -> RegimeFlags {
    let recoil = species.recoil_frequency(lattice_wavelength);
    let linewidth = species.linewidth_hz();
    RegimeFlags {
        lamb_dicke_axial: axial > recoil,
        lamb_dicke_radial: radial > recoil,
        strong_confinement_axial: axial > linewidth,
        strong_confinement_radial: radial > linewidth,
    }
}

/// Lamb-Dicke: ν > recoil frequency. Strong confinement: ν > Γ/2π.
pub fn classify_regimes(trap: &TrapParameters, species: &Species) -> RegimeFlags {
    classify_frequencies(trap.axial_frequency, trap.radial_frequency, trap.lattice_wavelength, species)
}

/// Spatial shape of the loaded lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudShape {
    /// Gaussian width of the well-population envelope along the lattice (m).
    pub envelope_sigma: f64,
    /// Thermal widths (x, y, z) inside one well; z is the lattice axis (m).
    pub per_well_sigmas: [f64; 3],
    /// λ/2 (m).
    pub well_spacing: f64,
}

impl CloudShape {
    /// Per-well widths from the harmonic frequencies at temperature `t`.
    pub fn thermal(trap: &TrapParameters, temperature: f64, envelope_sigma: f64, species: &Species) -> Result<Self> {
        ensure(temperature > 0.0, || "temperature must be positive".into())?;
        let v = (PhysicalConstants::KB * temperature / species.mass).sqrt();
        let radial = v / (2.0 * PI * trap.radial_frequency);
        let axial = v / (2.0 * PI * trap.axial_frequency);
        let shape = CloudShape {
            envelope_sigma,
            per_well_sigmas: [radial, radial, axial],
            well_spacing: trap.well_spacing(),
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.envelope_sigma, self.well_spacing]
            .into_iter()
            .chain(self.per_well_sigmas);
        for s in all {
            ensure(s > 0.0 && s.is_finite(), || format!("degenerate cloud width {s}"))?;
        }
        Ok(())
    }

    /// Harmonic-well validity: the axial per-well width is well below the
    /// well spacing.
    pub fn wells_resolved(&self) -> bool {
        self.per_well_sigmas[2] < 0.25 * self.well_spacing
    }

    /// Fraction of the atoms sitting in the central well.
    pub fn central_well_fraction(&self) -> f64 {
        self.well_spacing / ((2.0 * PI).sqrt() * self.envelope_sigma)
    }
}

/// Envelope width that yields `target_peak_density` for `n` atoms with the
/// given per-well widths. Used to calibrate the envelope on measured peak
/// densities, since the cloud size itself was not reported.
pub fn envelope_for_peak_density(n: f64, per_well_sigmas: [f64; 3], well_spacing: f64, target_peak_density: f64) -> Result<f64> {
    ensure(n > 0.0 && target_peak_density > 0.0, || "atom number and density must be positive".into())?;
    let local_volume = (2.0 * PI).powf(1.5) * per_well_sigmas.iter().product::<f64>();
    let central = target_peak_density * local_volume;
    Ok(n * well_spacing / ((2.0 * PI).sqrt() * central))
}

/// Atom number, temperature, trap and shape. `eta` is kept in sync with
/// depth and temperature by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapState {
    atom_number: f64,
    temperature: f64,
    trap: TrapParameters,
    shape: CloudShape,
    eta: f64,
}

impl TrapState {
    pub fn new(atom_number: f64, temperature: f64, trap: TrapParameters, shape: CloudShape) -> Result<Self> {
        ensure(atom_number >= 0.0, || format!("atom number must be non-negative, got {atom_number}"))?;
        ensure(temperature > 0.0, || format!("temperature must be positive, got {temperature}"))?;
        ensure(trap.well_depth > 0.0, || "well depth must be positive".into())?;
        shape.validate()?;
        Ok(TrapState {
            atom_number,
            temperature,
            trap,
            shape,
            eta: trap.well_depth / (PhysicalConstants::KB * temperature),
        })
    }

    /// Thermal state with per-well widths from `trap` and `temperature`.
    pub fn thermal(atom_number: f64, temperature: f64, trap: TrapParameters, envelope_sigma: f64, species: &Species) -> Result<Self> {
        let shape = CloudShape::thermal(&trap, temperature, envelope_sigma, species)?;
        Self::new(atom_number, temperature, trap, shape)
    }

    pub fn atom_number(&self) -> f64 {
        self.atom_number
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn trap(&self) -> &TrapParameters {
        &self.trap
    }
    pub fn shape(&self) -> &CloudShape {
        &self.shape
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn with_atom_number(&self, atom_number: f64) -> Result<Self> {
        Self::new(atom_number, self.temperature, self.trap, self.shape)
    }

    /// New temperature at fixed trap; per-well widths follow √T.
    pub fn with_temperature(&self, temperature: f64, species: &Species) -> Result<Self> {
        Self::thermal(self.atom_number, temperature, self.trap, self.shape.envelope_sigma, species)
    }

    /// New depth and temperature; frequencies and widths are recomputed.
    pub fn with_depth_and_temperature(&self, depth: f64, temperature: f64, species: &Species) -> Result<Self> {
        let trap = TrapParameters::from_depth(depth, self.trap.lattice_wavelength, self.trap.waist, species)?;
        Self::thermal(self.atom_number, temperature, trap, self.shape.envelope_sigma, species)
    }
}

/// Normalisation of `∫ρ² d³r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityConvention {
    /// `N ρ_peak / 4`, consistent with `ξ = β ρ_peak / (4γ)`.
    #[default]
    Lattice,
    /// `N ρ_peak / 2^{3/2}` for a single 3-D Gaussian.
    SingleGaussian,
}

impl DensityConvention {
    pub fn factor(self) -> f64 {
        match self {
            DensityConvention::Lattice => 0.25,
            DensityConvention::SingleGaussian => 2f64.powf(-1.5),
        }
    }
}

/// Peak density (m⁻³) at the centre of the central well.
pub fn peak_density(state: &TrapState) -> Result<f64> {
    let shape = state.shape();
    shape.validate()?;
    let local_volume = (2.0 * PI).powf(1.5) * shape.per_well_sigmas.iter().product::<f64>();
    Ok(state.atom_number() * shape.central_well_fraction() / local_volume)
}

/// `∫ρ² d³r` for atom number `n` and peak density `rho_peak`.
pub fn density_squared_integral_from_peak(n: f64, rho_peak: f64, convention: DensityConvention) -> f64 {
    n * rho_peak * convention.factor()
}

pub fn density_squared_integral(state: &TrapState, convention: DensityConvention) -> Result<f64> {
    Ok(density_squared_integral_from_peak(state.atom_number(), peak_density(state)?, convention))
}

/// ρ̄ = ∫ρ² / N.
pub fn mean_density(state: &TrapState, convention: DensityConvention) -> Result<f64> {
    if state.atom_number() == 0.0 {
        return Err(Error::InvalidInput("mean density undefined for N = 0".into()));
    }
    Ok(density_squared_integral(state, convention)? / state.atom_number())
}

/// ρ_peak λ_dB³.
pub fn phase_space_density(peak_density: f64, temperature: f64, species: &Species) -> Result<f64> {
    ensure(peak_density >= 0.0, || "density must be non-negative".into())?;
    let l = species.thermal_de_broglie(temperature)?;
    Ok(peak_density * l * l * l)
}

pub fn state_phase_space_density(state: &TrapState, species: &Species) -> Result<f64> {
    phase_space_density(peak_density(state)?, state.temperature(), species)
}

/// Per-atom field reflectivity r = α / (ε₀ λ w₀²).
pub fn reflectivity_per_atom(polarizability: f64, wavelength: f64, waist: f64) -> f64 {
    polarizability / (PhysicalConstants::EPS0 * wavelength * waist * waist)
}

/// Collective-coupling parameter r N F.
pub fn collective_coupling(polarizability: f64, wavelength: f64, waist: f64, atom_number: f64, finesse: f64) -> Result<f64> {
    ensure(
        polarizability > 0.0 && wavelength > 0.0 && waist > 0.0 && atom_number > 0.0 && finesse > 0.0,
        || "collective coupling needs positive inputs".into(),
    )?;
    Ok(reflectivity_per_atom(polarizability, wavelength, waist) * atom_number * finesse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{finesse_from_linewidth, free_spectral_range, linewidth_from_ring_down, ModeGeometry};
    use crate::constants::{uk_to_joule, RB85};

    const LAMBDA: f64 = 787.6e-9;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn w0() -> f64 {
        ModeGeometry::reference_setup().effective_waist()
    }

    fn trap(depth_uk: f64) -> TrapParameters {
        TrapParameters::from_depth(uk_to_joule(depth_uk), LAMBDA, w0(), &RB85).unwrap()
    }

    #[test]
    fn dipole_scaling_with_detuning() {
        let d2_only = Species { line_strengths: [1.0, 0.0], ..RB85 };
        let c = PhysicalConstants::C;
        let omega0 = 2.0 * PI * c / d2_only.lambda_d2;
        let delta = -2.0 * PI * 3.0e12;
        let lambda_at = |d: f64| 2.0 * PI * c / (omega0 + d);
        let a = dipole_depth_and_scatter(1e8, lambda_at(delta), &d2_only).unwrap();
        let b = dipole_depth_and_scatter(1e8, lambda_at(2.0 * delta), &d2_only).unwrap();
        assert!(rel(b.potential, a.potential / 2.0) < 1e-12);
        assert!(rel(b.scattering_rate, a.scattering_rate / 4.0) < 1e-12);
        assert!(a.potential < 0.0);
    }

    #[test]
    fn zero_intensity_and_resonance() {
        let r = dipole_depth_and_scatter(0.0, LAMBDA, &RB85).unwrap();
        assert_eq!((r.potential, r.scattering_rate), (0.0, 0.0));
        assert!(dipole_depth_and_scatter(1e8, RB85.lambda_d2, &RB85).is_err());
        assert!(dipole_depth_and_scatter(1e8, RB85.lambda_d1, &RB85).is_err());
    }

    #[test]
    fn depth_to_scatter_ratio_against_operating_point() {
        // Operating point: 350 μK depth at 40 photons/s.
        let quoted_ratio = uk_to_joule(350.0) / 40.0;
        let d2_only = Species { line_strengths: [1.0, 0.0], ..RB85 };
        let d2 = dipole_depth_and_scatter(1e8, LAMBDA, &d2_only).unwrap();
        let d2_ratio = d2.depth() / d2.scattering_rate;
        assert!(d2_ratio / quoted_ratio > 0.5 && d2_ratio / quoted_ratio < 2.0, "{}", d2_ratio / quoted_ratio);
        // 787.6 nm sits between the lines, so the D1 line pulls the depth
        // down and adds scattering; the full model lands within an order
        // of magnitude only.
        let both = dipole_depth_and_scatter(1e8, LAMBDA, &RB85).unwrap();
        let ratio = both.depth() / both.scattering_rate / quoted_ratio;
        assert!(ratio > 0.1 && ratio < 1.0, "{ratio}");
    }

    #[test]
    fn secular_frequency_examples() {
        let (a, r) = secular_frequencies(uk_to_joule(350.0), LAMBDA, w0(), &RB85).unwrap();
        assert!(rel(a, 332e3) < 3e-3, "{a}");
        assert!(rel(r, 450e3 / 1e3) < 5e-3, "{r}");
        assert!(rel(a, 340e3) < 0.05 && rel(r, 460.0) < 0.05);
        let (a4, r4) = secular_frequencies(uk_to_joule(1400.0), LAMBDA, w0(), &RB85).unwrap();
        assert!(rel(a4, 2.0 * a) < 1e-14 && rel(r4, 2.0 * r) < 1e-14);
        let (a100, _) = secular_frequencies(uk_to_joule(100.0), LAMBDA, w0(), &RB85).unwrap();
        assert!(rel(a100, (100.0f64 / 350.0).sqrt() * a) < 1e-14);
        assert!(rel(a100, 177e3) < 5e-3);
        assert!(secular_frequencies(0.0, LAMBDA, w0(), &RB85).is_err());
    }

    #[test]
    fn secular_round_trip() {
        for uk in [1.0, 100.0, 350.0, 1e5] {
            let t = trap(uk);
            let back = depth_from_axial_frequency(t.axial_frequency, LAMBDA, &RB85);
            assert!(rel(back, t.well_depth) < 1e-10);
        }
    }

    #[test]
    fn regimes_at_operating_point() {
        let f = classify_regimes(&trap(350.0), &RB85);
        assert!(f.lamb_dicke_axial);
        assert!(!f.lamb_dicke_radial);
        assert!(!f.strong_confinement_axial);
        assert!(!f.strong_confinement_radial);
    }

    #[test]
    fn regimes_at_25_mw() {
        // Depth scales with input power: 60 μW → 350 μK, so 25 mW → 146 mK.
        let f = classify_regimes(&trap(350.0 * 25e-3 / 60e-6), &RB85);
        assert!(f.lamb_dicke_radial);
        assert!(f.strong_confinement_axial);
    }

    #[test]
    fn strong_confinement_boundary_is_strict() {
        let g = RB85.linewidth_hz();
        let f = classify_frequencies(g, g, LAMBDA, &RB85);
        assert!(!f.strong_confinement_axial && !f.strong_confinement_radial);
        let f = classify_frequencies(g * (1.0 + 1e-12), 1.0, LAMBDA, &RB85);
        assert!(f.strong_confinement_axial);
    }

    #[test]
    fn regimes_monotone_in_depth() {
        let mut prev = classify_regimes(&trap(1.0), &RB85);
        for k in 1..60 {
            let f = classify_regimes(&trap(1.3f64.powi(k)), &RB85);
            assert!(!prev.lamb_dicke_axial || f.lamb_dicke_axial);
            assert!(!prev.lamb_dicke_radial || f.lamb_dicke_radial);
            assert!(!prev.strong_confinement_axial || f.strong_confinement_axial);
            assert!(!prev.strong_confinement_radial || f.strong_confinement_radial);
            prev = f;
        }
    }

    fn calibrated_state(n: f64, t_uk: f64, depth_uk: f64, rho_peak_cm3: f64) -> TrapState {
        let tr = trap(depth_uk);
        let probe = CloudShape::thermal(&tr, t_uk * 1e-6, 1e-3, &RB85).unwrap();
        let env = envelope_for_peak_density(n, probe.per_well_sigmas, probe.well_spacing, rho_peak_cm3 * 1e6).unwrap();
        TrapState::thermal(n, t_uk * 1e-6, tr, env, &RB85).unwrap()
    }

    #[test]
    fn peak_density_examples() {
        let a = calibrated_state(4e6, 123.0, 350.0, 9e11);
        assert!(rel(peak_density(&a).unwrap(), 9e17) < 1e-12);
        assert!(a.shape().wells_resolved());
        let a2 = a.with_atom_number(8e6).unwrap();
        assert!(rel(peak_density(&a2).unwrap(), 2.0 * 9e17) < 1e-12);
        let b = calibrated_state(1.5e6, 38.0, 100.0, 6.8e11);
        assert!(rel(peak_density(&b).unwrap(), 6.8e17) < 1e-12);
    }

    #[test]
    fn default_envelope_reproduces_state_a() {
        let s = TrapState::thermal(4e6, 123e-6, trap(350.0), 555.6e-6, &RB85).unwrap();
        assert!(rel(peak_density(&s).unwrap(), 9e17) < 1e-3);
    }

    #[test]
    fn density_integral_conventions() {
        let rho = 1e12 * 1e6;
        let g = density_squared_integral_from_peak(1e6, rho, DensityConvention::SingleGaussian);
        assert!(rel(g * 1e-6, 3.5355e17) < 1e-4);
        let l = density_squared_integral_from_peak(1e6, rho, DensityConvention::Lattice);
        assert!(rel(l * 1e-6, 2.5e17) < 1e-15);
        assert_eq!(density_squared_integral_from_peak(0.0, rho, DensityConvention::Lattice), 0.0);
    }

    #[test]
    fn mean_density_examples() {
        let s = calibrated_state(4e6, 123.0, 350.0, 9e11);
        let peak = peak_density(&s).unwrap();
        assert!(rel(mean_density(&s, DensityConvention::Lattice).unwrap(), peak / 4.0) < 1e-14);
        assert!(rel(mean_density(&s, DensityConvention::SingleGaussian).unwrap(), peak * 2f64.powf(-1.5)) < 1e-14);
        let zero = s.with_atom_number(0.0).unwrap();
        assert!(mean_density(&zero, DensityConvention::Lattice).is_err());
    }

    #[test]
    fn mean_density_scales_as_eta_three_halves() {
        let s = calibrated_state(4e6, 123.0, 350.0, 9e11);
        let cold = s.with_temperature(123e-6 / 4.0, &RB85).unwrap();
        assert!(rel(cold.eta(), 4.0 * s.eta()) < 1e-14);
        let r = mean_density(&cold, DensityConvention::Lattice).unwrap()
            / mean_density(&s, DensityConvention::Lattice).unwrap();
        assert!(rel(r, 8.0) < 1e-12);
    }

    #[test]
    fn degenerate_shape_rejected() {
        let tr = trap(350.0);
        let shape = CloudShape { envelope_sigma: 0.0, per_well_sigmas: [1e-5, 1e-5, 1e-8], well_spacing: tr.well_spacing() };
        assert!(TrapState::new(1e6, 1e-4, tr, shape).is_err());
    }

    #[test]
    fn phase_space_density_examples() {
        let a = phase_space_density(9e17, 123e-6, &RB85).unwrap();
        assert!(rel(a, 4.5e-6) < 0.01, "{a}");
        let b = phase_space_density(6.8e17, 38e-6, &RB85).unwrap();
        assert!(rel(b, 2.0e-5) < 0.02, "{b}");
        assert_eq!(phase_space_density(0.0, 1e-4, &RB85).unwrap(), 0.0);
    }

    #[test]
    fn psd_scales_as_n_over_t_cubed() {
        // Per-well widths follow √T, λ_dB³ follows T^{-3/2}.
        let s = calibrated_state(4e6, 123.0, 350.0, 9e11);
        let base = state_phase_space_density(&s, &RB85).unwrap();
        let hot = s.with_temperature(2.0 * 123e-6, &RB85).unwrap().with_atom_number(3.0 * 4e6).unwrap();
        let r = state_phase_space_density(&hot, &RB85).unwrap() / base;
        assert!(rel(r, 3.0 / 8.0) < 1e-12, "{r}");
    }

    #[test]
    fn collective_coupling_examples() {
        let (lam, w) = (LAMBDA, w0());
        let alpha = PhysicalConstants::EPS0 * lam * w * w / (1e6 * 1.8e5);
        assert!(rel(collective_coupling(alpha, lam, w, 1e6, 1.8e5).unwrap(), 1.0) < 1e-14);
        let one = collective_coupling(3e-39, lam, w, 1e6, 1.8e5).unwrap();
        let two = collective_coupling(3e-39, lam, w, 2e6, 1.8e5).unwrap();
        assert!(rel(two, 2.0 * one) < 1e-15);
        assert!(collective_coupling(0.0, lam, w, 1e6, 1.8e5).is_err());
    }

    #[test]
    fn collective_coupling_in_strong_regime() {
        let alpha = polarizability(LAMBDA, &RB85).unwrap();
        assert!(alpha > 0.0);
        let finesse = finesse_from_linewidth(
            free_spectral_range(0.097).unwrap(),
            linewidth_from_ring_down(9.2e-6).unwrap(),
        )
        .unwrap();
        let rnf = collective_coupling(alpha, LAMBDA, w0(), 1e6, finesse).unwrap();
        assert!(rnf > 0.1 && rnf < 10.0, "{rnf}");
    }
}
