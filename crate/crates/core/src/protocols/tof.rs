//! Ballistic-expansion thermometry.
//!
//! A thermal cloud released from the trap expands as
//! `σ²(t) = σ₀² + (k_B T / m) t²`. The fit is least squares of σ² against
//! t², which is linear and needs no optimiser. Each point is weighted by
//! 1/σ⁴, matching width errors proportional to the width; without the
//! weights the late, wide images swamp the intercept.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::constants::{PhysicalConstants, Species};
use crate::error::{ensure, Error, Result};

/// σ(t) = √(σ₀² + (k_B T/m) t²).
pub fn expansion_sigma(sigma0: f64, temperature: f64, t: f64, species: &Species) -> Result<f64> {
    ensure(t >= 0.0, || format!("expansion time must be non-negative, got {t}"))?;
    ensure(temperature >= 0.0 && sigma0 >= 0.0, || "sigma0 and temperature must be non-negative".into())?;
    Ok((sigma0 * sigma0 + PhysicalConstants::KB * temperature / species.mass * t * t).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionRecord {
    /// Expansion time (s).
    pub t: f64,
    /// Measured 1/√e radius (m).
    pub sigma: f64,
    /// Integrated fluorescence, in atoms.
    pub amplitude: f64,
}

/// Generating values of a synthetic series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticTruth {
    pub temperature: f64,
    pub sigma0: f64,
    pub atom_number: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpansionSeries {
    pub records: Vec<ExpansionRecord>,
    pub truth: Option<SyntheticTruth>,
    /// Free-fall drop ½ g t² of the cloud centre per record (m); the lattice
    /// axis is vertical.
    pub center_drop: Vec<f64>,
}

impl ExpansionSeries {
    pub fn from_records(records: Vec<ExpansionRecord>) -> Self {
        let center_drop = records.iter().map(|r| 0.5 * PhysicalConstants::G * r.t * r.t).collect();
        ExpansionSeries { records, truth: None, center_drop }
    }
}

/// Series with relative Gaussian noise `noise_rel` on every width and
/// amplitude. Deterministic for a fixed `seed`.
pub fn synthesize_expansion(
    atom_number: f64,
    temperature: f64,
    sigma0: f64,
    times: &[f64],
    noise_rel: f64,
    seed: u64,
    species: &Species,
) -> Result<ExpansionSeries> {
    ensure(noise_rel >= 0.0 && noise_rel.is_finite(), || "noise level must be non-negative".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut records = Vec::with_capacity(times.len());
    for &t in times {
        let sigma = expansion_sigma(sigma0, temperature, t, species)?;
        let zs: f64 = normal.sample(&mut rng);
        let za: f64 = normal.sample(&mut rng);
        records.push(ExpansionRecord {
            t,
            sigma: sigma * (1.0 + noise_rel * zs),
            amplitude: atom_number * (1.0 + noise_rel * za),
        });
    }
    let mut series = ExpansionSeries::from_records(records);
    series.truth = Some(SyntheticTruth { temperature, sigma0, atom_number });
    Ok(series)
}

/// Fitted initial-cloud parameters with 1σ uncertainties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionFit {
    pub temperature: f64,
    pub temperature_err: f64,
    pub sigma0: f64,
    pub sigma0_err: f64,
    pub atom_number: f64,
    pub atom_number_err: f64,
    /// Weighted residual sum of squares, Σ ((σ² − model)/σ²)².
    pub rss: f64,
}

pub fn fit_expansion(series: &ExpansionSeries, species: &Species) -> Result<ExpansionFit> {
    // Sort so the result does not depend on record order.
    let mut recs = series.records.clone();
    recs.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.sigma.total_cmp(&b.sigma)).then(a.amplitude.total_cmp(&b.amplitude)));
    let mut distinct = recs.iter().map(|r| r.t).collect::<Vec<_>>();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 distinct expansion times, got {}",
            distinct.len()
        )));
    }
    let n = recs.len() as f64;
    let xs: Vec<f64> = recs.iter().map(|r| r.t * r.t).collect();
    let ys: Vec<f64> = recs.iter().map(|r| r.sigma * r.sigma).collect();
    let ws: Vec<f64> = ys.iter().map(|y| 1.0 / (y * y)).collect();
    if ws.iter().any(|w| !w.is_finite()) {
        return Err(Error::Degenerate("a measured width is zero".into()));
    }
    let w_sum: f64 = ws.iter().sum();
    let x_mean = xs.iter().zip(&ws).map(|(x, w)| w * x).sum::<f64>() / w_sum;
    let y_mean = ys.iter().zip(&ws).map(|(y, w)| w * y).sum::<f64>() / w_sum;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).zip(&ws).map(|((x, y), w)| w * (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    if intercept <= 0.0 {
        return Err(Error::Degenerate(format!("fitted sigma0² = {intercept} is not positive")));
    }
    if slope < 0.0 {
        return Err(Error::Degenerate(format!("fitted expansion slope {slope} is negative")));
    }
    let rss: f64 = xs.iter().zip(&ys).zip(&ws).map(|((x, y), w)| w * (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let s2 = if dof > 0.0 { rss / dof } else { 0.0 };
    let slope_err = (s2 / sxx).sqrt();
    let intercept_err = (s2 * (1.0 / w_sum + x_mean * x_mean / sxx)).sqrt();
    let to_temperature = species.mass / PhysicalConstants::KB;
    let sigma0 = intercept.sqrt();

    let amp_mean = recs.iter().map(|r| r.amplitude).sum::<f64>() / n;
    let amp_var = recs.iter().map(|r| (r.amplitude - amp_mean).powi(2)).sum::<f64>() / (n - 1.0);

    Ok(ExpansionFit {
        temperature: slope * to_temperature,
        temperature_err: slope_err * to_temperature,
        sigma0,
        sigma0_err: intercept_err / (2.0 * sigma0),
        atom_number: amp_mean,
        atom_number_err: (amp_var / n).sqrt(),
        rss,
    })
}
