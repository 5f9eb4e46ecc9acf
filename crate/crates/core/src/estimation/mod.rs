//! Least-squares fitting of the loss and temperature laws to measured series.
//!
//! Uncertainties come from the linearised covariance at the optimum scaled by
//! the reduced χ². They are approximate: they ignore parameter correlations
//! beyond second order and any misfit of the model itself.

pub mod fits;
pub mod lm;

pub use fits::{fit_decay, fit_epsilon, fit_epsilon_with, DecayGuess, EpsilonFitMode};
pub use lm::{LeastSquaresProblem, LmOutcome, LmSettings};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Population,
    Temperature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub t: f64,
    pub value: f64,
    pub sigma: Option<f64>,
}

impl DataPoint {
    /// Per-point weight denominator; 1 when no uncertainty is given.
    pub fn sigma_or_unit(&self) -> f64 {
        self.sigma.unwrap_or(1.0)
    }
}

/// A time series with strictly increasing times and positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<DataPoint>,
    kind: DatasetKind,
}

impl Dataset {
    pub fn new(points: Vec<DataPoint>, kind: DatasetKind) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            ensure(p.t.is_finite() && p.t >= 0.0, || format!("point {i}: time {} must be finite and non-negative", p.t))?;
            ensure(p.value.is_finite() && p.value > 0.0, || format!("point {i}: value {} must be positive", p.value))?;
            if let Some(s) = p.sigma {
                ensure(s.is_finite() && s > 0.0, || format!("point {i}: sigma {s} must be positive"))?;
            }
        }
        for w in points.windows(2) {
            ensure(w[1].t > w[0].t, || format!("times must increase strictly ({} then {})", w[0].t, w[1].t))?;
        }
        Ok(Dataset { points, kind })
    }

    /// Unweighted series from `(t, value)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], kind: DatasetKind) -> Result<Self> {
        Self::new(pairs.iter().map(|&(t, value)| DataPoint { t, value, sigma: None }).collect(), kind)
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A fitted parameter in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct FitParameter {
    pub name: &'static str,
    pub value: f64,
    pub uncertainty: f64,
    pub unit: &'static str,
}

/// The model evaluated at the fitted point, for residuals and plotting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedModel {
    Decay { n0: f64, gamma: f64, xi: f64 },
    Temperature { t0: f64, epsilon: f64, xi: f64, gamma: f64 },
}

impl FittedModel {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match *self {
            FittedModel::Decay { n0, gamma, xi } => crate::loss::population(t, n0, gamma, xi),
            FittedModel::Temperature { t0, epsilon, xi, gamma } => {
                crate::evaporation::temperature(t, t0, epsilon, xi, gamma)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub parameters: Vec<FitParameter>,
    pub model: FittedModel,
    /// Σ((model − data)/σ)².
    pub rss: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// The optimum sits on the edge of the search interval.
    pub at_boundary: bool,
    pub n_points: usize,
    pub n_free: usize,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<&FitParameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameter(name).map(|p| p.value)
    }

    pub fn reduced_chi_squared(&self) -> f64 {
        self.rss / self.n_points.saturating_sub(self.n_free).max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub t: f64,
    pub data: f64,
    pub model: f64,
    /// (model − data)/σ.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residuals: Vec<Residual>,
    pub rss: f64,
    pub reduced_chi_squared: f64,
}

/// Per-point residuals of `result` against `dataset`.
pub fn residual_report(result: &FitResult, dataset: &Dataset) -> Result<ResidualReport> {
    let residuals = dataset
        .points()
        .iter()
        .map(|p| {
            let model = result.model.evaluate(p.t)?;
            Ok(Residual { t: p.t, data: p.value, model, weighted: (model - p.value) / p.sigma_or_unit() })
        })
        .collect::<Result<Vec<_>>>()?;
    let rss = residuals.iter().map(|r| r.weighted * r.weighted).sum::<f64>();
    let dof = dataset.len().saturating_sub(result.n_free).max(1) as f64;
    Ok(ResidualReport { residuals, rss, reduced_chi_squared: rss / dof })
}

/// Multiply every value by `1 + noise_rel z` with standard-normal `z` drawn
/// from a ChaCha8 stream seeded by `seed`.
pub fn with_relative_noise(samples: &[(f64, f64)], noise_rel: f64, seed: u64) -> Result<Vec<(f64, f64)>> {
    ensure(noise_rel >= 0.0 && noise_rel.is_finite(), || format!("noise level {noise_rel} must be non-negative"))?;
    if noise_rel == 0.0 {
        return Ok(samples.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok(samples
        .iter()
        .map(|&(t, v)| {
            let z: f64 = normal.sample(&mut rng);
            (t, v * (1.0 + noise_rel * z))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_noise_is_seeded() {
        let s = [(0.0, 1.0), (1.0, 2.0)];
        assert_eq!(with_relative_noise(&s, 0.0, 1).unwrap(), s.to_vec());
        let a = with_relative_noise(&s, 0.03, 9).unwrap();
        assert_eq!(a, with_relative_noise(&s, 0.03, 9).unwrap());
        assert_ne!(a, with_relative_noise(&s, 0.03, 10).unwrap());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::from_pairs(&[(0.0, 1.0), (1.0, 0.5)], DatasetKind::Population).is_ok());
        assert!(Dataset::from_pairs(&[(1.0, 1.0), (1.0, 0.5)], DatasetKind::Population).is_err());
        assert!(Dataset::from_pairs(&[(0.0, 1.0), (1.0, 0.0)], DatasetKind::Population).is_err());
        let bad_sigma = vec![DataPoint { t: 0.0, value: 1.0, sigma: Some(0.0) }];
        assert!(Dataset::new(bad_sigma, DatasetKind::Temperature).is_err());
    }
}
