//! Damped Gauss–Newton (Levenberg–Marquardt) minimisation of a sum of
//! squared residuals.
//!
//! Marquardt scaling: the damping term is `λ diag(JᵀJ)`. The damping grows
//! tenfold whenever a trial step fails to lower the residual sum and shrinks
//! tenfold after every accepted step. Iteration stops when an accepted step
//! changes the RSS by less than `rss_rel_tol` relative, or when the scaled
//! gradient falls below `grad_tol`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A least-squares problem in `n_params` unknowns.
pub trait LeastSquaresProblem {
    fn n_params(&self) -> usize;
    /// Weighted residuals `(model − data) / σ`.
    fn residuals(&self, params: &[f64]) -> Result<Vec<f64>>;
    /// `∂ residual_i / ∂ param_j`, one row per residual.
    fn jacobian(&self, params: &[f64]) -> Result<DMatrix<f64>>;
    fn is_feasible(&self, _params: &[f64]) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub max_iterations: usize,
    pub rss_rel_tol: f64,
    pub grad_tol: f64,
    pub initial_damping: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        LmSettings { max_iterations: 200, rss_rel_tol: 1e-12, grad_tol: 1e-10, initial_damping: 1e-3 }
    }
}

const DAMPING_UP: f64 = 10.0;
const DAMPING_DOWN: f64 = 0.1;
const DAMPING_MAX: f64 = 1e20;

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub rss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Scaled gradient ∞-norm at the returned point.
    pub gradient_norm: f64,
    /// JᵀJ at the returned point, for covariance estimates.
    pub normal_matrix: DMatrix<f64>,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// max_i |(Jᵀr)_i| / (√(JᵀJ)_ii √rss); the cosine between the residual and
/// each Jacobian column.
fn scaled_gradient(jtj: &DMatrix<f64>, g: &DVector<f64>, rss: f64) -> f64 {
    if rss == 0.0 {
        return 0.0;
    }
    (0..g.len())
        .map(|i| {
            let d = jtj[(i, i)];
            if d > 0.0 {
                g[i].abs() / (d.sqrt() * rss.sqrt())
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

pub fn minimize<P: LeastSquaresProblem>(problem: &P, initial: &[f64], settings: &LmSettings) -> Result<LmOutcome> {
    let n = problem.n_params();
    if initial.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} initial parameters, got {}", initial.len())));
    }
    if !problem.is_feasible(initial) {
        return Err(Error::InvalidInput(format!("initial guess {initial:?} is infeasible")));
    }
    let mut params = initial.to_vec();
    let mut residuals = problem.residuals(&params)?;
    let mut rss = sum_sq(&residuals);
    let mut damping = settings.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    loop {
        let jac = problem.jacobian(&params)?;
        let r = DVector::from_column_slice(&residuals);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let grad = scaled_gradient(&jtj, &g, rss);
        if (0..n).any(|i| jtj[(i, i)] == 0.0) {
            return Err(Error::Degenerate("Jacobian has a zero column; a parameter does not affect the model".into()));
        }
        if converged || rss == 0.0 || grad < settings.grad_tol || iterations >= settings.max_iterations {
            converged = converged || rss == 0.0 || grad < settings.grad_tol;
            return Ok(LmOutcome { params, rss, iterations, converged, gradient_norm: grad, normal_matrix: jtj });
        }
        iterations += 1;

        loop {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += damping * jtj[(i, i)];
            }
            let step = a.cholesky().map(|c| c.solve(&(-&g)));
            let trial = step.and_then(|delta| {
                let p: Vec<f64> = params.iter().zip(delta.iter()).map(|(p, d)| p + d).collect();
                if !problem.is_feasible(&p) {
                    return None;
                }
                let r = problem.residuals(&p).ok()?;
                let s = sum_sq(&r);
                s.is_finite().then_some((p, r, s))
            });
            match trial {
                Some((p, r, s)) if s < rss => {
                    let rel_change = (rss - s) / rss;
                    params = p;
                    residuals = r;
                    rss = s;
                    damping = (damping * DAMPING_DOWN).max(1e-15);
                    if rel_change < settings.rss_rel_tol {
                        converged = true;
                    }
                    break;
                }
                _ => {
                    damping *= DAMPING_UP;
                    if damping > DAMPING_MAX {
                        // No descent direction left: we sit at a minimum to
                        // working precision.
                        converged = true;
                        break;
                    }
                }
            }
        }
    }
}

/// Parameter covariance `s² (JᵀJ)⁻¹` with `s² = rss / (n − p)`.
pub fn covariance(outcome: &LmOutcome, n_points: usize) -> Result<DMatrix<f64>> {
    let p = outcome.params.len();
    let dof = n_points.saturating_sub(p).max(1) as f64;
    let inv = outcome
        .normal_matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular normal matrix at the optimum".into()))?;
    Ok(inv * (outcome.rss / dof))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y = a e^{−b x}.
    struct ExpFit {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquaresProblem for ExpFit {
        fn n_params(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64]) -> Result<Vec<f64>> {
            Ok(self.x.iter().zip(&self.y).map(|(x, y)| p[0] * (-p[1] * x).exp() - y).collect())
        }
        fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
            Ok(DMatrix::from_fn(self.x.len(), 2, |i, j| {
                let e = (-p[1] * self.x[i]).exp();
                if j == 0 { e } else { -p[0] * self.x[i] * e }
            }))
        }
    }

    #[test]
    fn recovers_exponential() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.2).collect();
        let y = x.iter().map(|x| 3.0 * (-0.7 * x).exp()).collect();
        let out = minimize(&ExpFit { x, y }, &[1.0, 0.1], &LmSettings::default()).unwrap();
        assert!(out.converged);
        assert!((out.params[0] - 3.0).abs() < 1e-9);
        assert!((out.params[1] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.2).collect();
        let y = x.iter().map(|x| 3.0 * (-0.7 * x).exp()).collect();
        let settings = LmSettings { max_iterations: 1, ..LmSettings::default() };
        let out = minimize(&ExpFit { x, y }, &[1.0, 0.1], &settings).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn dead_parameter_is_degenerate() {
        // All x = 0: the decay constant has no effect.
        let fit = ExpFit { x: vec![0.0; 5], y: vec![1.0; 5] };
        assert!(matches!(minimize(&fit, &[2.0, 0.5], &LmSettings::default()), Err(Error::Degenerate(_))));
    }
}
