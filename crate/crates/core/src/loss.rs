//! Atom-number decay under one-body and two-body losses.
//!
//! ```text
//! dN/dt = −γ N − β ∫ρ² d³r
//! ```
//!
//! At constant temperature the peak density follows `N`, and with the
//! lattice normalisation `∫ρ² = N ρ_peak / 4` the equation closes to
//! `dN/dt = −γN − γξ N²/N₀` with `ξ = β ρ_peak(0) / (4γ)`. Its solution is
//!
//! ```text
//! N(t) = N₀ e^{−γt} / (1 + ξ (1 − e^{−γt}))
//! ```
//!
//! `β` is SI (m³/s) inside this module; the I/O layer speaks cm³/s.

use crate::error::{ensure, Error, Result};
use crate::ode;
use crate::trap::{density_squared_integral_from_peak, DensityConvention};

/// Parameters of the decay law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    /// One-body loss rate (1/s).
    pub gamma: f64,
    /// Two-body coefficient (m³/s).
    pub beta: f64,
    /// Dimensionless two-body strength β ρ_peak / (4γ).
    pub xi: f64,
}

impl LossParams {
    pub fn from_beta(gamma: f64, beta: f64, rho_peak: f64) -> Result<Self> {
        let xi = xi_from_beta(beta, rho_peak, gamma)?;
        ensure(beta >= 0.0, || format!("beta must be non-negative, got {beta}"))?;
        Ok(LossParams { gamma, beta, xi })
    }
}

/// ξ = β ρ_peak / (4γ).
pub fn xi_from_beta(beta: f64, rho_peak: f64, gamma: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Err(Error::InvalidInput("xi is undefined for gamma = 0".into()));
    }
    ensure(gamma > 0.0, || format!("gamma must be positive, got {gamma}"))?;
    Ok(beta * rho_peak / (4.0 * gamma))
}

/// β = 4γξ / ρ_peak.
pub fn beta_from_xi(xi: f64, rho_peak: f64, gamma: f64) -> Result<f64> {
    ensure(rho_peak > 0.0, || "peak density must be positive".into())?;
    Ok(4.0 * gamma * xi / rho_peak)
}

fn check_time(t: f64) -> Result<()> {
    ensure(t >= 0.0 && t.is_finite(), || format!("time must be finite and non-negative, got {t}"))
}

/// Closed-form N(t).
pub fn population(t: f64, n0: f64, gamma: f64, xi: f64) -> Result<f64> {
    check_time(t)?;
    let e = (-gamma * t).exp();
    Ok(n0 * e / (1.0 + xi * (1.0 - e)))
}

/// Closed form written in β; stays finite as γ → 0, where it becomes
/// the hyperbolic two-body decay `N₀ / (1 + β ρ_peak t / 4)`.
pub fn population_from_beta(t: f64, n0: f64, gamma: f64, beta: f64, rho_peak: f64) -> Result<f64> {
    check_time(t)?;
    ensure(gamma >= 0.0, || "gamma must be non-negative".into())?;
    // (1 − e^{−γt}) / γ, continuous at γ = 0.
    let growth = if gamma == 0.0 { t } else { -(-gamma * t).exp_m1() / gamma };
    Ok(n0 * (-gamma * t).exp() / (1.0 + beta * rho_peak / 4.0 * growth))
}

/// Atoms lost to the one-body and two-body channels: (N₁, N₂) with
/// N₁ = N₀ (1 − e^{−γt}) and N₂ = N₀ − N₁ − N(t).
pub fn loss_partition(t: f64, n0: f64, gamma: f64, xi: f64) -> Result<(f64, f64)> {
    let n = population(t, n0, gamma, xi)?;
    let n1 = -n0 * (-gamma * t).exp_m1();
    Ok((n1, n0 - n1 - n))
}

/// Supplies `∫ρ² d³r` for the current atom number.
pub trait DensityClosure {
    fn density_squared_integral(&self, n: f64) -> f64;
}

/// Constant-temperature closure: ρ_peak(t) = ρ_peak(0) N / N₀.
#[derive(Debug, Clone, Copy)]
pub struct ConstantTemperature {
    pub rho_peak0: f64,
    pub n0: f64,
    pub convention: DensityConvention,
}

impl DensityClosure for ConstantTemperature {
    fn density_squared_integral(&self, n: f64) -> f64 {
        density_squared_integral_from_peak(n, self.rho_peak0 * n / self.n0, self.convention)
    }
}

/// Sampled N(t).
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrajectory {
    pub samples: Vec<(f64, f64)>,
    pub params: LossParams,
    pub n0: f64,
}

impl PopulationTrajectory {
    /// Closed-form trajectory on `grid`.
    pub fn closed_form(n0: f64, params: LossParams, grid: &[f64]) -> Result<Self> {
        ode::validate_grid(grid)?;
        let samples = grid
            .iter()
            .map(|&t| population(t, n0, params.gamma, params.xi).map(|n| (t, n)))
            .collect::<Result<_>>()?;
        Ok(PopulationTrajectory { samples, params, n0 })
    }
}

/// Fixed-step RK4 integration of the rate equation with an arbitrary
/// density closure.
pub fn integrate_decay<D: DensityClosure>(n0: f64, params: LossParams, density: &D, grid: &[f64]) -> Result<PopulationTrajectory> {
    let rhs = |_t: f64, n: f64| -params.gamma * n - params.beta * density.density_squared_integral(n);
    let values = ode::integrate_on_grid(rhs, n0, grid)?;
    Ok(PopulationTrajectory {
        samples: grid.iter().copied().zip(values).collect(),
        params,
        n0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Trace (a) in SI.
    const BETA_A: f64 = 7.5e-12 * 1e-6;
    const RHO_A: f64 = 9e11 * 1e6;

    #[test]
    fn xi_examples() {
        let xa = xi_from_beta(BETA_A, RHO_A, 0.6).unwrap();
        assert!(rel(xa, 2.81) < 2e-3 && rel(xa, 2.80) < 0.02);
        let xb = xi_from_beta(1.7e-17, 6.8e17, 0.76).unwrap();
        assert!(rel(xb, 3.80) < 2e-3 && rel(xb, 3.72) < 0.03);
        assert_eq!(xi_from_beta(0.0, RHO_A, 0.6).unwrap(), 0.0);
        assert!(xi_from_beta(BETA_A, RHO_A, 0.0).is_err());
    }

    #[test]
    fn population_examples() {
        assert_eq!(population(0.0, 4e6, 0.6, 2.8).unwrap(), 4e6);
        for t in [0.1, 1.0, 5.0] {
            assert!(rel(population(t, 4e6, 0.6, 0.0).unwrap(), 4e6 * (-0.6 * t).exp()) < 1e-15);
        }
        assert!(population(-1.0, 4e6, 0.6, 2.8).is_err());
        assert!(population(200.0, 4e6, 0.6, 2.8).unwrap() < 1e-40);
    }

    #[test]
    fn closed_form_matches_rk4() {
        for &(gamma, xi) in &[(0.6, 2.80), (0.76, 3.72), (0.2, 0.5), (1.0, 5.0)] {
            let n0 = 4e6;
            let beta = BETA_A;
            let rho = 4.0 * gamma * xi / beta;
            let params = LossParams { gamma, beta, xi };
            let closure = ConstantTemperature { rho_peak0: rho, n0, convention: DensityConvention::Lattice };
            let mut grid = ode::uniform_grid(5.0, 51).unwrap();
            grid.push(5.0 + 1e-9);
            grid.insert(11, 1.0 / gamma);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let traj = integrate_decay(n0, params, &closure, &grid).unwrap();
            for &(t, n) in &traj.samples {
                let exact = population(t, n0, gamma, xi).unwrap();
                assert!(rel(n, exact) < 1e-6, "t={t} {n} vs {exact}");
            }
        }
    }

    #[test]
    fn beta_zero_is_exponential() {
        let params = LossParams { gamma: 0.6, beta: 0.0, xi: 0.0 };
        let closure = ConstantTemperature { rho_peak0: RHO_A, n0: 1e6, convention: DensityConvention::Lattice };
        let grid = ode::uniform_grid(4.0, 9).unwrap();
        let traj = integrate_decay(1e6, params, &closure, &grid).unwrap();
        for &(t, n) in &traj.samples {
            assert!(rel(n, 1e6 * (-0.6 * t).exp()) < 1e-12);
        }
    }

    #[test]
    fn gamma_to_zero_limit_is_hyperbolic() {
        let k = BETA_A * RHO_A / 4.0;
        for t in [0.0, 0.5, 2.0, 10.0] {
            let exact = 4e6 / (1.0 + k * t);
            assert!(rel(population_from_beta(t, 4e6, 0.0, BETA_A, RHO_A).unwrap(), exact) < 1e-15);
            assert!(rel(population_from_beta(t, 4e6, 1e-9, BETA_A, RHO_A).unwrap(), exact) < 1e-8);
        }
        let params = LossParams { gamma: 0.0, beta: BETA_A, xi: 0.0 };
        let closure = ConstantTemperature { rho_peak0: RHO_A, n0: 4e6, convention: DensityConvention::Lattice };
        let grid = ode::uniform_grid(4.0, 5).unwrap();
        let traj = integrate_decay(4e6, params, &closure, &grid).unwrap();
        for &(t, n) in &traj.samples {
            assert!(rel(n, 4e6 / (1.0 + k * t)) < 1e-10);
        }
    }

    #[test]
    fn population_from_beta_agrees_with_xi_form() {
        let xi = xi_from_beta(BETA_A, RHO_A, 0.6).unwrap();
        for t in [0.0, 0.3, 1.7, 4.0] {
            let a = population(t, 4e6, 0.6, xi).unwrap();
            let b = population_from_beta(t, 4e6, 0.6, BETA_A, RHO_A).unwrap();
            assert!(rel(a, b) < 1e-13);
        }
    }

    #[test]
    fn partition_examples() {
        assert_eq!(loss_partition(0.0, 4e6, 0.6, 2.8).unwrap(), (0.0, 0.0));
        let (n1, n2) = loss_partition(1.0, 4e6, 0.6, 2.80).unwrap();
        let n = population(1.0, 4e6, 0.6, 2.80).unwrap();
        assert!((n1 + n2 + n - 4e6).abs() < 1.0);
        let (n1, n2) = loss_partition(500.0, 4e6, 0.6, 2.80).unwrap();
        assert_eq!(n1, 4e6);
        assert!(n2.abs() < 1e-6);
    }

    #[test]
    fn monotone_in_parameters() {
        let h = 1e-6;
        for t in [0.1, 1.0, 3.0] {
            let d_xi = population(t, 4e6, 0.6, 2.8 + h).unwrap() - population(t, 4e6, 0.6, 2.8 - h).unwrap();
            let d_g = population(t, 4e6, 0.6 + h, 2.8).unwrap() - population(t, 4e6, 0.6 - h, 2.8).unwrap();
            assert!(d_xi < 0.0 && d_g < 0.0);
        }
    }

    #[test]
    fn trajectory_is_decreasing() {
        let params = LossParams::from_beta(0.6, BETA_A, RHO_A).unwrap();
        let tr = PopulationTrajectory::closed_form(4e6, params, &ode::uniform_grid(5.0, 100).unwrap()).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
    }
}
