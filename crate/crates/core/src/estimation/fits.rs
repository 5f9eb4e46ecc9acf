//! Fits of the decay law N(t; N₀, γ, ξ) and of the temperature law in ε.

use nalgebra::DMatrix;

use super::lm::{self, LeastSquaresProblem, LmSettings};
use super::{Dataset, DatasetKind, FitParameter, FitResult, FittedModel};
use crate::error::{ensure, Error, Result};

/// Starting point for [`fit_decay`]. β in m³/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayGuess {
    pub gamma: f64,
    pub beta: f64,
    /// Defaults to the first data value.
    pub n0: Option<f64>,
}

/// Partial derivatives `(∂N/∂N₀, ∂N/∂γ, ∂N/∂ξ)` of the closed-form decay
/// law at fixed ξ.
pub fn decay_jacobian_row(t: f64, n0: f64, gamma: f64, xi: f64) -> [f64; 3] {
    let e = (-gamma * t).exp();
    let d = 1.0 + xi * (1.0 - e);
    let d2 = d * d;
    [e / d, -n0 * t * e * (1.0 + xi) / d2, -n0 * e * (1.0 - e) / d2]
}

struct DecayProblem<'a> {
    data: &'a Dataset,
}

impl LeastSquaresProblem for DecayProblem<'_> {
    fn n_params(&self) -> usize {
        3
    }

    fn residuals(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.data
            .points()
            .iter()
            .map(|pt| Ok((crate::loss::population(pt.t, p[0], p[1], p[2])? - pt.value) / pt.sigma_or_unit()))
            .collect()
    }

    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let pts = self.data.points();
        let mut j = DMatrix::zeros(pts.len(), 3);
        for (i, pt) in pts.iter().enumerate() {
            let row = decay_jacobian_row(pt.t, p[0], p[1], p[2]);
            for (k, v) in row.iter().enumerate() {
                j[(i, k)] = v / pt.sigma_or_unit();
            }
        }
        Ok(j)
    }

    fn is_feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[1] > 0.0 && p[2] > -1.0 && p.iter().all(|v| v.is_finite())
    }
}

/// Fit (N₀, γ, ξ) and report β = 4γξ/ρ_peak with a delta-method error bar.
///
/// Returns the best point found even when the iteration cap is hit; check
/// `converged`.
pub fn fit_decay(dataset: &Dataset, rho_peak: f64, guess: &DecayGuess) -> Result<FitResult> {
    ensure(dataset.kind() == DatasetKind::Population, || "decay fit needs a population dataset".into())?;
    ensure(dataset.len() >= 4, || format!("decay fit needs at least 4 points, got {}", dataset.len()))?;
    ensure(rho_peak > 0.0 && rho_peak.is_finite(), || "peak density must be positive".into())?;
    ensure(guess.gamma > 0.0 && guess.beta > 0.0, || "initial guess must be positive".into())?;
    let n0 = guess.n0.unwrap_or(dataset.points()[0].value);
    ensure(n0 > 0.0, || "initial N0 must be positive".into())?;
    let xi0 = crate::loss::xi_from_beta(guess.beta, rho_peak, guess.gamma)?;

    let outcome = lm::minimize(&DecayProblem { data: dataset }, &[n0, guess.gamma, xi0], &LmSettings::default())?;
    let cov = lm::covariance(&outcome, dataset.len())?;
    let [n0, gamma, xi] = [outcome.params[0], outcome.params[1], outcome.params[2]];
    let beta = 4.0 * gamma * xi / rho_peak;
    let k = 4.0 / rho_peak;
    let beta_var = k * k * (xi * xi * cov[(1, 1)] + gamma * gamma * cov[(2, 2)] + 2.0 * gamma * xi * cov[(1, 2)]);
    let sd = |i: usize| cov[(i, i)].max(0.0).sqrt();

    Ok(FitResult {
        parameters: vec![
            FitParameter { name: "N0", value: n0, uncertainty: sd(0), unit: "atoms" },
            FitParameter { name: "gamma", value: gamma, uncertainty: sd(1), unit: "1/s" },
            FitParameter { name: "xi", value: xi, uncertainty: sd(2), unit: "1" },
            FitParameter { name: "beta", value: beta, uncertainty: beta_var.max(0.0).sqrt(), unit: "m3/s" },
        ],
        model: FittedModel::Decay { n0, gamma, xi },
        rss: outcome.rss,
        converged: outcome.converged,
        iterations: outcome.iterations,
        gradient_norm: outcome.gradient_norm,
        at_boundary: false,
        n_points: dataset.len(),
        n_free: 3,
    })
}

/// Which parameters the temperature fit frees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonFitMode {
    /// ε alone, with (T₀, ξ, γ) fixed.
    #[default]
    EpsilonOnly,
    /// ε and T₀ together.
    Joint,
}

const GOLDEN_ITERATIONS: usize = 200;

/// Fit ε to a temperature series with (ξ, γ, T₀) fixed.
pub fn fit_epsilon(dataset: &Dataset, xi: f64, gamma: f64, t0: f64) -> Result<FitResult> {
    fit_epsilon_with(dataset, xi, gamma, t0, EpsilonFitMode::EpsilonOnly)
}

pub fn fit_epsilon_with(dataset: &Dataset, xi: f64, gamma: f64, t0: f64, mode: EpsilonFitMode) -> Result<FitResult> {
    ensure(dataset.kind() == DatasetKind::Temperature, || "epsilon fit needs a temperature dataset".into())?;
    ensure(dataset.len() >= 3, || format!("epsilon fit needs at least 3 points, got {}", dataset.len()))?;
    ensure(xi > 0.0 && gamma > 0.0 && t0 > 0.0, || "xi, gamma and T0 must be positive".into())?;
    match mode {
        EpsilonFitMode::EpsilonOnly => fit_epsilon_only(dataset, xi, gamma, t0),
        EpsilonFitMode::Joint => fit_epsilon_joint(dataset, xi, gamma, t0),
    }
}

/// T(t) = a − ε b(t) with a = T₀ and b = −T₀ ξ expm1(−γt) ≥ 0.
fn slope_terms(dataset: &Dataset, xi: f64, gamma: f64, t0: f64) -> Vec<(f64, f64, f64)> {
    dataset
        .points()
        .iter()
        .map(|p| (-t0 * xi * (-gamma * p.t).exp_m1(), p.value - t0, p.sigma_or_unit()))
        .collect()
}

fn fit_epsilon_only(dataset: &Dataset, xi: f64, gamma: f64, t0: f64) -> Result<FitResult> {
    let terms = slope_terms(dataset, xi, gamma, t0);
    // Residual (−ε b − (T − T₀)) / σ.
    let rss_at = |eps: f64| terms.iter().map(|&(b, d, s)| ((-eps * b - d) / s).powi(2)).sum::<f64>();
    let curvature: f64 = terms.iter().map(|&(b, _, s)| (b / s).powi(2)).sum();
    if curvature == 0.0 {
        return Err(Error::Degenerate("temperature data carry no information on epsilon".into()));
    }

    let lo = 0.0;
    let hi = (1.0 / xi) * (1.0 - 1e-12);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (rss_at(c), rss_at(d));
    let mut iterations = 0;
    while iterations < GOLDEN_ITERATIONS && (b - a) > 1e-15 * hi {
        iterations += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rss_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rss_at(d);
        }
    }
    let bracket = 0.5 * (a + b);
    // The objective is quadratic in ε, so one Newton step from the bracket
    // lands on the stationary point.
    let slope: f64 = terms.iter().map(|&(b, d, s)| 2.0 * (-bracket * b - d) / s * (-b / s)).sum();
    let polished = bracket - slope / (2.0 * curvature);
    let edge_tol = 1e-9 * hi;
    let (epsilon, at_boundary) = if polished <= lo + edge_tol {
        (lo.max(bracket), true)
    } else if polished >= hi - edge_tol {
        (hi.min(bracket), true)
    } else {
        (polished, false)
    };

    let rss = rss_at(epsilon);
    let dof = dataset.len().saturating_sub(1).max(1) as f64;
    let uncertainty = (rss / dof / curvature).sqrt();
    let gradient_norm = if rss > 0.0 {
        let g: f64 = terms.iter().map(|&(b, d, s)| (-epsilon * b - d) / s * (-b / s)).sum();
        g.abs() / (curvature.sqrt() * rss.sqrt())
    } else {
        0.0
    };

    Ok(FitResult {
        parameters: vec![FitParameter { name: "epsilon", value: epsilon, uncertainty, unit: "1" }],
        model: FittedModel::Temperature { t0, epsilon, xi, gamma },
        rss,
        converged: true,
        iterations,
        gradient_norm,
        at_boundary,
        n_points: dataset.len(),
        n_free: 1,
    })
}

struct JointProblem<'a> {
    data: &'a Dataset,
    xi: f64,
    gamma: f64,
}

impl LeastSquaresProblem for JointProblem<'_> {
    fn n_params(&self) -> usize {
        2
    }

    fn residuals(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.data
            .points()
            .iter()
            .map(|pt| {
                let m = p[0] * (1.0 + p[1] * self.xi * (-self.gamma * pt.t).exp_m1());
                Ok((m - pt.value) / pt.sigma_or_unit())
            })
            .collect()
    }

    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let pts = self.data.points();
        Ok(DMatrix::from_fn(pts.len(), 2, |i, k| {
            let g = (-self.gamma * pts[i].t).exp_m1();
            let v = if k == 0 { 1.0 + p[1] * self.xi * g } else { p[0] * self.xi * g };
            v / pts[i].sigma_or_unit()
        }))
    }

    fn is_feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[1] * self.xi < 1.0 && p[1] > -1.0 / self.xi
    }
}

fn fit_epsilon_joint(dataset: &Dataset, xi: f64, gamma: f64, t0: f64) -> Result<FitResult> {
    let start = fit_epsilon_only(dataset, xi, gamma, t0)?;
    let eps0 = start.model_epsilon().min(0.5 / xi);
    let problem = JointProblem { data: dataset, xi, gamma };
    let outcome = lm::minimize(&problem, &[t0, eps0], &LmSettings::default())?;
    let cov = lm::covariance(&outcome, dataset.len())?;
    let (t0, epsilon) = (outcome.params[0], outcome.params[1]);
    Ok(FitResult {
        parameters: vec![
            FitParameter { name: "epsilon", value: epsilon, uncertainty: cov[(1, 1)].max(0.0).sqrt(), unit: "1" },
            FitParameter { name: "T0", value: t0, uncertainty: cov[(0, 0)].max(0.0).sqrt(), unit: "K" },
        ],
        model: FittedModel::Temperature { t0, epsilon, xi, gamma },
        rss: outcome.rss,
        converged: outcome.converged,
        iterations: outcome.iterations,
        gradient_norm: outcome.gradient_norm,
        at_boundary: false,
        n_points: dataset.len(),
        n_free: 2,
    })
}

impl FitResult {
    fn model_epsilon(&self) -> f64 {
        match self.model {
            FittedModel::Temperature { epsilon, .. } => epsilon,
            FittedModel::Decay { .. } => f64::NAN,
        }
    }
}
