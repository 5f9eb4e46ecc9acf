//! Plain evaporation over a truncated Boltzmann distribution.
//!
//! Collisions are taken at the unitarity limit, `σ = 4πħ² / (μ² δv²)` with
//! `μ = m/2` and `δv² = 2 v_rms²`, which makes the evaporative loss
//! coefficient
//!
//! ```text
//! β_esc = σ v_rms η e^{−η} = 8πħ² η^{3/2} e^{−η} / √(3 U₀ m³)
//! ```
//!
//! Temperature follows `T(t) = T₀ (1 − εξ (1 − e^{−γt}))` where
//!
//! ```text
//! ε(η) = (2/3)η − 1 − (8 / 3√π) ∫₀^{√η} r⁴ e^{−r²} dr
//! ```
//!
//! measures the excess kinetic energy carried off per two-body loss event.

use std::f64::consts::PI;

use crate::constants::{PhysicalConstants, Species};
use crate::error::{ensure, Error, Result};
use crate::loss;
use crate::ode;
use crate::quadrature;

/// Absolute tolerance of the truncated-moment quadrature.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

/// η = U₀ / (k_B T).
pub fn eta(depth: f64, temperature: f64) -> Result<f64> {
    ensure(temperature > 0.0, || format!("temperature must be positive, got {temperature}"))?;
    Ok(depth / (PhysicalConstants::KB * temperature))
}

/// Unitarity-limited elastic cross section (m²) at temperature `t`.
pub fn unitarity_cross_section(temperature: f64, species: &Species) -> Result<f64> {
    ensure(temperature > 0.0, || format!("temperature must be positive, got {temperature}"))?;
    let mu = species.reduced_mass();
    let v = species.thermal_velocity(temperature)?;
    let dv2 = 2.0 * v * v;
    Ok(4.0 * PI * PhysicalConstants::HBAR.powi(2) / (mu * mu * dv2))
}

/// Closed-form evaporative loss coefficient (m³/s).
pub fn beta_esc(depth: f64, eta: f64, species: &Species) -> Result<f64> {
    ensure(depth > 0.0 && eta > 0.0, || {
        format!("depth and eta must be positive, got {depth} and {eta}")
    })?;
    let m = species.mass;
    Ok(8.0 * PI * PhysicalConstants::HBAR.powi(2) * eta.powf(1.5) * (-eta).exp()
        / (3.0 * depth * m * m * m).sqrt())
}

/// Detailed-balance evaporation rate Γ_ev = ρ̄ σ v_rms η e^{−η} (1/s).
pub fn evaporation_rate(mean_density: f64, temperature: f64, eta: f64, species: &Species) -> Result<f64> {
    ensure(mean_density >= 0.0, || "mean density must be non-negative".into())?;
    ensure(eta > 0.0, || format!("eta must be positive, got {eta}"))?;
    let sigma = unitarity_cross_section(temperature, species)?;
    let v = species.thermal_velocity(temperature)?;
    Ok(mean_density * sigma * v * eta * (-eta).exp())
}

/// Elastic collision rate ρ̄ σ δv_rms (1/s).
pub fn elastic_collision_rate(mean_density: f64, temperature: f64, species: &Species) -> Result<f64> {
    let sigma = unitarity_cross_section(temperature, species)?;
    let v = species.thermal_velocity(temperature)?;
    Ok(mean_density * sigma * 2f64.sqrt() * v)
}

/// ∫₀^{√η} r⁴ e^{−r²} dr by adaptive quadrature.
pub fn truncated_moment(eta: f64) -> Result<f64> {
    ensure(eta >= 0.0, || format!("eta must be non-negative, got {eta}"))?;
    quadrature::integrate(|r| r.powi(4) * (-r * r).exp(), 0.0, eta.sqrt(), MOMENT_TOLERANCE)
}

/// Antiderivative form (3√π/8) erf(√η) − (√η/4)(2η + 3) e^{−η} of the same
/// integral. Kept as an independent route.
pub fn truncated_moment_closed_form(eta: f64) -> f64 {
    let s = eta.sqrt();
    3.0 * PI.sqrt() / 8.0 * libm::erf(s) - s / 4.0 * (2.0 * eta + 3.0) * (-eta).exp()
}

/// ε(η).
pub fn epsilon(eta: f64) -> Result<f64> {
    Ok(2.0 / 3.0 * eta - 1.0 - 8.0 / (3.0 * PI.sqrt()) * truncated_moment(eta)?)
}

fn check_temperature_domain(epsilon: f64, xi: f64) -> Result<()> {
    if epsilon * xi >= 1.0 {
        return Err(Error::Domain(format!(
            "epsilon * xi = {} >= 1 drives the temperature to zero or below",
            epsilon * xi
        )));
    }
    Ok(())
}

/// T(t) = T₀ (1 − εξ (1 − e^{−γt})).
pub fn temperature(t: f64, t0: f64, epsilon: f64, xi: f64, gamma: f64) -> Result<f64> {
    ensure(t >= 0.0, || format!("time must be non-negative, got {t}"))?;
    check_temperature_domain(epsilon, xi)?;
    Ok(t0 * (1.0 + epsilon * xi * (-gamma * t).exp_m1()))
}

/// Parameters of the temperature law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureParams {
    pub t0: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureTrajectory {
    pub samples: Vec<(f64, f64)>,
    pub params: TemperatureParams,
}

impl TemperatureTrajectory {
    pub fn closed_form(params: TemperatureParams, grid: &[f64]) -> Result<Self> {
        ode::validate_grid(grid)?;
        let samples = grid
            .iter()
            .map(|&t| temperature(t, params.t0, params.epsilon, params.xi, params.gamma).map(|v| (t, v)))
            .collect::<Result<_>>()?;
        Ok(TemperatureTrajectory { samples, params })
    }
}

/// (η, U₀, ε, β_esc) for one starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvapParams {
    pub eta: f64,
    pub depth: f64,
    pub epsilon: f64,
    /// m³/s.
    pub beta_esc: f64,
}

impl EvapParams {
    /// η is fixed at the initial temperature and held for the trajectory.
    pub fn at_start(depth: f64, t0: f64, species: &Species) -> Result<Self> {
        let eta = eta(depth, t0)?;
        Ok(EvapParams { eta, depth, epsilon: epsilon(eta)?, beta_esc: beta_esc(depth, eta, species)? })
    }
}

/// Energy carried off per evaporated atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovedEnergy {
    /// W̄ = U₀ − Ū_η (J).
    pub mean_kinetic: f64,
    /// Ū_η, the mean potential energy inside the trapping volume (J).
    pub mean_potential: f64,
}

/// W̄ = (3/2) k_B T₀ (1 + ε(η)) and Ū_η = U₀ − W̄ with U₀ = η k_B T₀.
pub fn removed_energy_mean(t0: f64, eta: f64) -> Result<RemovedEnergy> {
    ensure(t0 > 0.0, || format!("temperature must be positive, got {t0}"))?;
    let kt = PhysicalConstants::KB * t0;
    let w_bar = 1.5 * kt * (1.0 + epsilon(eta)?);
    Ok(RemovedEnergy { mean_kinetic: w_bar, mean_potential: eta * kt - w_bar })
}

/// Mean kinetic energy per atom from the loss bookkeeping
/// `N W = N₀W₀ − N₁W₀ − N₂W̄`.
pub fn bookkeeping_energy(t: f64, n0: f64, gamma: f64, xi: f64, w0: f64, w_bar: f64) -> Result<f64> {
    let n = loss::population(t, n0, gamma, xi)?;
    let (n1, n2) = loss::loss_partition(t, n0, gamma, xi)?;
    Ok((n0 * w0 - n1 * w0 - n2 * w_bar) / n)
}

/// Collision regime assumed for `T σ_cc` in the photo-association scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacRegime {
    /// `T σ_cc` constant.
    Unitarity,
    /// `σ_cc` constant, so `T σ_cc ∝ T`; the ratio is an upper bound.
    ZeroTemperature,
}

/// Minimal state needed by the photo-association comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacState {
    pub atom_number: f64,
    pub temperature: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacComparison {
    /// Predicted Γ_PAC(b) / Γ_PAC(a).
    pub ratio: f64,
    /// True if the ratio is an upper bound rather than a prediction.
    pub is_bound: bool,
    pub decreases: bool,
    /// η of the two states differ by more than [`PAC_ETA_TOLERANCE`].
    pub eta_mismatch: bool,
}

/// Relative η difference beyond which the common-η assumption is flagged.
pub const PAC_ETA_TOLERANCE: f64 = 0.1;

/// Γ_PAC ∝ η^{5/2} N T σ_cc with η treated as common to both states.
pub fn pac_scaling_comparator(a: &PacState, b: &PacState, regime: PacRegime) -> Result<PacComparison> {
    for s in [a, b] {
        ensure(s.atom_number > 0.0 && s.temperature > 0.0 && s.eta > 0.0, || {
            "PAC states need positive N, T and eta".into()
        })?;
    }
    let eta_mismatch = ((b.eta - a.eta) / a.eta).abs() > PAC_ETA_TOLERANCE;
    let (ratio, is_bound) = match regime {
        PacRegime::Unitarity => (b.atom_number / a.atom_number, false),
        PacRegime::ZeroTemperature => {
            (b.atom_number * b.temperature / (a.atom_number * a.temperature), true)
        }
    };
    Ok(PacComparison { ratio, is_bound, decreases: ratio < 1.0, eta_mismatch })
}
