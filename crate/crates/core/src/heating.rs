//! Parametric heating from well-depth noise.
//!
//! A trap mode at frequency ν heats at `γ = π² ν² S(2ν)`, where `S` is the
//! one-sided power spectral density of the relative intensity fluctuations
//! in 1/Hz. In thermal equilibrium the total rate is `(γ_a + 2γ_r)/3`.

use crate::error::{ensure, Error, Result};
use crate::evaporation::{self, TemperatureParams, TemperatureTrajectory};
use crate::ode;

/// One-sided relative-intensity-noise spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    samples: Vec<(f64, f64)>,
}

impl NoiseSpectrum {
    /// `samples` are `(frequency in Hz, S_rel in 1/Hz)` with strictly
    /// increasing positive frequencies.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        ensure(samples.len() >= 2, || "a spectrum needs at least two samples".into())?;
        ensure(samples[0].0 > 0.0, || "spectrum frequencies must be positive".into())?;
        ensure(samples.windows(2).all(|w| w[1].0 > w[0].0), || {
            "spectrum frequencies must be strictly increasing".into()
        })?;
        ensure(samples.iter().all(|s| s.1 >= 0.0 && s.1.is_finite()), || {
            "spectral density must be finite and non-negative".into()
        })?;
        Ok(NoiseSpectrum { samples })
    }

    /// Constant density over `[f_min, f_max]`.
    pub fn flat(level: f64, f_min: f64, f_max: f64) -> Result<Self> {
        Self::new(vec![(f_min, level), (f_max, level)])
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Density at `f`, interpolated linearly in log-frequency. No
    /// extrapolation.
    pub fn density_at(&self, f: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(f >= lo && f <= hi) {
            return Err(Error::InvalidInput(format!(
                "frequency {f} Hz lies outside the spectrum [{lo}, {hi}] Hz"
            )));
        }
        let i = self.samples.partition_point(|s| s.0 <= f);
        if i == self.samples.len() {
            return Ok(self.samples[i - 1].1);
        }
        let (f0, s0) = self.samples[i - 1];
        let (f1, s1) = self.samples[i];
        let w = (f.ln() - f0.ln()) / (f1.ln() - f0.ln());
        Ok(s0 + w * (s1 - s0))
    }

    /// Copy with every density multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&(f, s)| (f, c * s)).collect())
    }
}

/// γ = π² ν² S(2ν) for a trap mode of frequency `trap_frequency` (Hz).
pub fn parametric_rate(spectrum: &NoiseSpectrum, trap_frequency: f64) -> Result<f64> {
    ensure(trap_frequency > 0.0, || "trap frequency must be positive".into())?;
    let s = spectrum.density_at(2.0 * trap_frequency)?;
    Ok(std::f64::consts::PI.powi(2) * trap_frequency * trap_frequency * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingRates {
    pub gamma_a: f64,
    pub gamma_r: f64,
    pub gamma_tot: f64,
    /// 1/γ_tot; `None` when nothing heats.
    pub e_folding_time: Option<f64>,
}

/// γ_tot = (γ_a + 2γ_r)/3 and its e-folding time.
pub fn total_rate(gamma_a: f64, gamma_r: f64) -> Result<HeatingRates> {
    ensure(gamma_a >= 0.0 && gamma_r >= 0.0, || "heating rates must be non-negative".into())?;
    let gamma_tot = (gamma_a + 2.0 * gamma_r) / 3.0;
    let e_folding_time = (gamma_tot > 0.0).then(|| 1.0 / gamma_tot);
    Ok(HeatingRates { gamma_a, gamma_r, gamma_tot, e_folding_time })
}

pub fn rates_from_spectrum(spectrum: &NoiseSpectrum, axial: f64, radial: f64) -> Result<HeatingRates> {
    total_rate(parametric_rate(spectrum, axial)?, parametric_rate(spectrum, radial)?)
}

fn temperature_rate(p: &TemperatureParams, gamma_tot: f64, t: f64, temp: f64) -> f64 {
    -p.epsilon * p.xi * p.gamma * (-p.gamma * t).exp() * p.t0 + gamma_tot * temp
}

/// RK4 solution of `dT/dt = −εξγ e^{−γt} T₀ + γ_tot T`.
pub fn combined_temperature_ode(params: TemperatureParams, gamma_tot: f64, grid: &[f64]) -> Result<TemperatureTrajectory> {
    if params.epsilon * params.xi >= 1.0 {
        return Err(Error::Domain(format!(
            "epsilon * xi = {} >= 1 is outside the cooling model",
            params.epsilon * params.xi
        )));
    }
    let values = ode::integrate_on_grid(|t, temp| temperature_rate(&params, gamma_tot, t, temp), params.t0, grid)?;
    Ok(TemperatureTrajectory { samples: grid.iter().copied().zip(values).collect(), params })
}

/// First grid time in `(0, t_max]` at which heating overtakes evaporative
/// cooling in the combined model, if any.
pub fn heating_onset(params: TemperatureParams, gamma_tot: f64, t_max: f64) -> Result<Option<f64>> {
    let grid = ode::uniform_grid(t_max, 4097)?;
    let traj = combined_temperature_ode(params, gamma_tot, &grid)?;
    Ok(traj
        .samples
        .iter()
        .skip(1)
        .find(|&&(t, temp)| temperature_rate(&params, gamma_tot, t, temp) >= 0.0)
        .map(|s| s.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingBound {
    /// Largest γ_tot compatible with a monotone temperature decrease (1/s).
    pub bound: f64,
    /// Time at which the minimum is attained (s).
    pub t_at_min: f64,
}

impl HeatingBound {
    pub fn e_folding_time(&self) -> f64 {
        1.0 / self.bound
    }
}

/// Samples used to locate the minimum of the bound over the window.
pub const BOUND_SAMPLES: usize = 4096;

/// min over t ∈ [0, t_max] of εξγ e^{−γt} T₀ / T(t) with T(t) from the
/// closed-form temperature law.
pub fn bound_gamma_tot(params: TemperatureParams, t_max: f64) -> Result<HeatingBound> {
    ensure(t_max >= 0.0 && t_max.is_finite(), || format!("t_max must be non-negative, got {t_max}"))?;
    let p = params;
    let at = |t: f64| -> Result<f64> {
        let temp = evaporation::temperature(t, p.t0, p.epsilon, p.xi, p.gamma)?;
        Ok(p.epsilon * p.xi * p.gamma * (-p.gamma * t).exp() * p.t0 / temp)
    };
    let mut best = HeatingBound { bound: at(0.0)?, t_at_min: 0.0 };
    if t_max > 0.0 {
        for i in 1..=BOUND_SAMPLES {
            let t = t_max * i as f64 / BOUND_SAMPLES as f64;
            let v = at(t)?;
            if v < best.bound {
                best = HeatingBound { bound: v, t_at_min: t };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const TRACE_A: TemperatureParams = TemperatureParams { t0: 123e-6, epsilon: 0.057, xi: 2.80, gamma: 0.6 };

    fn flat_for(gamma_tot: f64, axial: f64, radial: f64) -> NoiseSpectrum {
        // Solved by hand: γ_tot = π² S₀ (ν_a² + 2ν_r²) / 3.
        let s0 = 3.0 * gamma_tot / (PI * PI * (axial * axial + 2.0 * radial * radial));
        NoiseSpectrum::flat(s0, 10.0, 1e7).unwrap()
    }

    #[test]
    fn spectrum_validation_and_interpolation() {
        assert!(NoiseSpectrum::new(vec![(10.0, 1.0)]).is_err());
        assert!(NoiseSpectrum::new(vec![(10.0, 1.0), (10.0, 2.0)]).is_err());
        assert!(NoiseSpectrum::new(vec![(10.0, -1.0), (20.0, 2.0)]).is_err());
        let s = NoiseSpectrum::new(vec![(10.0, 1.0), (1000.0, 3.0)]).unwrap();
        assert!((s.density_at(100.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(s.density_at(1000.0).unwrap(), 3.0);
        assert_eq!(s.density_at(10.0).unwrap(), 1.0);
        assert!(s.density_at(5.0).is_err());
        assert!(s.density_at(2000.0).is_err());
    }

    #[test]
    fn parametric_rate_examples() {
        let zero = NoiseSpectrum::flat(0.0, 1.0, 1e7).unwrap();
        assert_eq!(parametric_rate(&zero, 340e3).unwrap(), 0.0);
        let s = flat_for(0.041, 340e3, 460.0);
        let rates = rates_from_spectrum(&s, 340e3, 460.0).unwrap();
        assert!((rates.gamma_tot - 0.041).abs() < 1e-6);
        let g = parametric_rate(&s, 340e3).unwrap();
        let g2 = parametric_rate(&s.scaled(2.0).unwrap(), 340e3).unwrap();
        assert!(rel(g2, 2.0 * g) < 1e-15);
        // 2ν beyond the measured band.
        let narrow = NoiseSpectrum::flat(1e-12, 10.0, 1e5).unwrap();
        assert!(parametric_rate(&narrow, 340e3).is_err());
    }

    #[test]
    fn scaling_is_linear_in_density() {
        let s = NoiseSpectrum::new(vec![(100.0, 3e-13), (1e4, 1e-13), (1e6, 4e-14)]).unwrap();
        let a = rates_from_spectrum(&s, 3.3e5, 450.0).unwrap();
        let b = rates_from_spectrum(&s.scaled(7.0).unwrap(), 3.3e5, 450.0).unwrap();
        assert!(rel(b.gamma_a, 7.0 * a.gamma_a) < 1e-14);
        assert!(rel(b.gamma_r, 7.0 * a.gamma_r) < 1e-14);
        assert!(rel(b.gamma_tot, 7.0 * a.gamma_tot) < 1e-14);
    }

    #[test]
    fn total_rate_examples() {
        let r = total_rate(0.041, 0.041).unwrap();
        assert!(rel(r.gamma_tot, 0.041) < 1e-15);
        assert!((r.e_folding_time.unwrap() - 24.4).abs() < 0.05);
        assert!(rel(total_rate(0.1, 0.0).unwrap().gamma_tot, 0.1 / 3.0) < 1e-15);
        assert_eq!(total_rate(0.0, 0.0).unwrap().e_folding_time, None);
        assert!(total_rate(-1.0, 0.0).is_err());
    }

    #[test]
    fn combined_reduces_to_closed_form() {
        let grid = ode::uniform_grid(4.0, 201).unwrap();
        let ode_traj = combined_temperature_ode(TRACE_A, 0.0, &grid).unwrap();
        let closed = TemperatureTrajectory::closed_form(TRACE_A, &grid).unwrap();
        for (a, b) in ode_traj.samples.iter().zip(&closed.samples) {
            assert!(rel(a.1, b.1) < 1e-9);
        }
    }

    #[test]
    fn pure_heating_is_exponential() {
        let p = TemperatureParams { epsilon: 0.0, ..TRACE_A };
        let grid = ode::uniform_grid(10.0, 11).unwrap();
        let traj = combined_temperature_ode(p, 0.041, &grid).unwrap();
        for &(t, temp) in &traj.samples {
            assert!(rel(temp, p.t0 * (0.041 * t).exp()) < 1e-12);
        }
    }

    #[test]
    fn psd_rate_overtakes_cooling_within_window() {
        let onset = heating_onset(TRACE_A, 0.041, 4.0).unwrap();
        let t = onset.expect("heating should overtake before 4 s");
        assert!(t > 0.0 && t < 4.0);
        assert_eq!(heating_onset(TRACE_A, 0.005, 4.0).unwrap(), None);
    }

    #[test]
    fn bound_examples() {
        let b = bound_gamma_tot(TRACE_A, 4.0).unwrap();
        assert!(rel(b.bound, 0.0102) < 0.05, "{}", b.bound);
        assert_eq!(b.t_at_min, 4.0);
        let zero = bound_gamma_tot(TRACE_A, 0.0).unwrap();
        assert!(rel(zero.bound, 0.057 * 2.80 * 0.6) < 1e-15);
        assert!((1.0 / 0.01f64 - 100.0).abs() < 1e-12);
    }

    #[test]
    fn bound_decreases_with_window_and_ignores_scale() {
        let mut prev = f64::INFINITY;
        for t_max in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let b = bound_gamma_tot(TRACE_A, t_max).unwrap().bound;
            assert!(b < prev);
            prev = b;
        }
        let scaled = TemperatureParams { t0: 7.0 * TRACE_A.t0, ..TRACE_A };
        let a = bound_gamma_tot(TRACE_A, 4.0).unwrap().bound;
        assert!(rel(bound_gamma_tot(scaled, 4.0).unwrap().bound, a) < 1e-14);
    }

    #[test]
    fn domain_violations() {
        let bad = TemperatureParams { epsilon: 0.5, xi: 2.0, ..TRACE_A };
        assert!(matches!(bound_gamma_tot(bad, 4.0), Err(Error::Domain(_))));
        let grid = ode::uniform_grid(1.0, 3).unwrap();
        assert!(matches!(combined_temperature_ode(bad, 0.0, &grid), Err(Error::Domain(_))));
    }
}
