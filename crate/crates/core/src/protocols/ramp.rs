//! Well-depth ramps.
//!
//! The simulator splits a ramp into [`RAMP_STEPS`] uniform steps. Each step
//! first rescales the temperature adiabatically (`T ∝ √U` in a harmonic
//! well), then applies evaporation at the instantaneous η over the step:
//!
//! ```text
//! dN/N = −g Γ_ev dt        dT/T = −g max(ε(η), 0) Γ_ev dt
//! ```
//!
//! with `Γ_ev = ρ̄ β_esc(U, η)` and a rethermalisation gate
//! `g = min(1, Γ_el t_elapsed)`, `Γ_el = ρ̄ σ δv_rms`. The gate is a
//! saturating heuristic: a ramp shorter than a few collision times barely
//! evaporates. ε is floored at zero because the truncated-Boltzmann
//! estimate turns negative below η ≈ 2.3, where it no longer describes the
//! energy carried off by escaping atoms.

use crate::constants::{PhysicalConstants, Species};
use crate::error::{ensure, Result};
use crate::evaporation;
use crate::trap::{mean_density, DensityConvention, TrapState};

/// Uniform steps per ramp.
pub const RAMP_STEPS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProfile {
    /// Initial depth (J).
    pub u_initial: f64,
    /// Final depth (J).
    pub u_final: f64,
    /// Ramp time (s); zero is a sudden change.
    pub duration: f64,
    pub shape: RampShape,
}

impl RampProfile {
    pub fn linear(u_initial: f64, u_final: f64, duration: f64) -> Result<Self> {
        let p = RampProfile { u_initial, u_final, duration, shape: RampShape::Linear };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.u_initial > 0.0 && self.u_final > 0.0, || "ramp depths must be positive".into())?;
        ensure(self.duration >= 0.0 && self.duration.is_finite(), || {
            format!("ramp duration must be non-negative, got {}", self.duration)
        })
    }

    /// Depth after fraction `s ∈ [0, 1]` of the ramp.
    pub fn depth_at(&self, s: f64) -> f64 {
        match self.shape {
            RampShape::Linear => self.u_initial + (self.u_final - self.u_initial) * s,
        }
    }
}

/// How evaporation acts during the ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RethermalizationModel {
    /// Evaporation scaled by min(1, Γ_el t_elapsed).
    #[default]
    Gated,
    /// Full evaporation from the first step on.
    Instant,
    /// Adiabatic rescaling only.
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampOutcome {
    pub final_temperature: f64,
    pub final_atom_number: f64,
    pub final_eta: f64,
    /// T_i √(U_f / U_i).
    pub adiabatic_reference: f64,
    /// Fractional depth change per unit time stayed below the radial
    /// angular trap frequency on every step.
    pub quasi_static: bool,
}

/// T_f = T_i √(U_f / U_i).
pub fn adiabatic_final_temperature(t_initial: f64, u_initial: f64, u_final: f64) -> Result<f64> {
    ensure(t_initial > 0.0 && u_initial > 0.0 && u_final > 0.0, || {
        "temperature and depths must be positive".into()
    })?;
    Ok(t_initial * (u_final / u_initial).sqrt())
}

/// Integrate a ramp starting from `state`. The starting depth is taken from
/// the profile; the state supplies N, T, the lattice geometry and the
/// envelope width.
pub fn ramp_simulate(state: &TrapState, profile: &RampProfile, model: RethermalizationModel, species: &Species) -> Result<RampOutcome> {
    profile.validate()?;
    let adiabatic_reference = adiabatic_final_temperature(state.temperature(), profile.u_initial, profile.u_final)?;
    if profile.duration == 0.0 {
        return Ok(RampOutcome {
            final_temperature: adiabatic_reference,
            final_atom_number: state.atom_number(),
            final_eta: profile.u_final / (PhysicalConstants::KB * adiabatic_reference),
            adiabatic_reference,
            quasi_static: false,
        });
    }

    let dt = profile.duration / RAMP_STEPS as f64;
    let mut current = state.with_depth_and_temperature(profile.u_initial, state.temperature(), species)?;
    let mut temperature = current.temperature();
    let mut atoms = current.atom_number();
    let mut depth = profile.u_initial;
    let mut quasi_static = true;

    for i in 0..RAMP_STEPS {
        let next = profile.depth_at((i + 1) as f64 / RAMP_STEPS as f64);
        temperature *= (next / depth).sqrt();
        current = current.with_depth_and_temperature(next, temperature, species)?.with_atom_number(atoms)?;
        let log_rate = (next / depth).ln().abs() / dt;
        if log_rate > 2.0 * std::f64::consts::PI * current.trap().radial_frequency {
            quasi_static = false;
        }
        depth = next;

        if model == RethermalizationModel::Disabled || atoms == 0.0 {
            continue;
        }
        let eta = current.eta();
        let rho_bar = mean_density(&current, DensityConvention::Lattice)?;
        let gamma_ev = rho_bar * evaporation::beta_esc(depth, eta, species)?;
        let gate = match model {
            RethermalizationModel::Gated => {
                let gamma_el = evaporation::elastic_collision_rate(rho_bar, temperature, species)?;
                (gamma_el * (i + 1) as f64 * dt).min(1.0)
            }
            _ => 1.0,
        };
        let eps = evaporation::epsilon(eta)?.max(0.0);
        atoms *= (-gate * gamma_ev * dt).exp();
        temperature *= (-gate * eps * gamma_ev * dt).exp();
        current = current.with_temperature(temperature, species)?.with_atom_number(atoms)?;
    }

    Ok(RampOutcome {
        final_temperature: temperature,
        final_atom_number: atoms,
        final_eta: current.eta(),
        adiabatic_reference,
        quasi_static,
    })
}
