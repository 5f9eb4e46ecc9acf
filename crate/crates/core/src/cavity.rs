//! Ring-resonator figures of merit.
//!
//! Finesse is available by two routes: from the measured linewidth and free
//! spectral range, and from the mirror loss budget in the high-reflectivity
//! limit `F = 2π / Σloss`. The reference cavity sits at 33.6 ppm
//! round-trip loss, where the difference to the exact Airy finesse is below
//! 1e-4.

use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{ensure, Error, Result};

/// A single cavity mirror. Losses are fractions (1 ppm = 1e-6).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSpec {
    pub transmission: f64,
    pub scatter_loss: f64,
    /// Radius of curvature in metres; `None` for a plane mirror.
    pub curvature_radius: Option<f64>,
}

impl MirrorSpec {
    pub fn new(transmission: f64, scatter_loss: f64, curvature_radius: Option<f64>) -> Result<Self> {
        let m = MirrorSpec { transmission, scatter_loss, curvature_radius };
        m.validate()?;
        Ok(m)
    }

    pub fn from_ppm(transmission_ppm: f64, scatter_ppm: f64, curvature_radius: Option<f64>) -> Result<Self> {
        Self::new(transmission_ppm * 1e-6, scatter_ppm * 1e-6, curvature_radius)
    }

    pub fn loss(&self) -> f64 {
        self.transmission + self.scatter_loss
    }

    fn validate(&self) -> Result<()> {
        ensure(self.transmission >= 0.0 && self.scatter_loss >= 0.0, || {
            "mirror transmission and scatter must be non-negative".into()
        })?;
        ensure(self.loss() < 1.0, || format!("mirror loss {} must be below 1", self.loss()))?;
        if let Some(r) = self.curvature_radius {
            ensure(r > 0.0, || format!("curvature radius must be positive, got {r}"))?;
        }
        Ok(())
    }
}

/// Triangular ring resonator: three mirrors and a round-trip path.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySpec {
    pub mirrors: Vec<MirrorSpec>,
    /// Round-trip path length (m).
    pub round_trip_length: f64,
    /// Power coupled into each travelling mode (W).
    pub input_power_per_mode: f64,
    pub mode_matching_efficiency: f64,
}

impl CavitySpec {
    pub fn new(
        mirrors: Vec<MirrorSpec>,
        round_trip_length: f64,
        input_power_per_mode: f64,
        mode_matching_efficiency: f64,
    ) -> Result<Self> {
        let c = CavitySpec { mirrors, round_trip_length, input_power_per_mode, mode_matching_efficiency };
        c.validate()?;
        Ok(c)
    }

    /// The ring used in the experiment: two curved 0.8 ppm high reflectors
    /// and a plane 23 ppm incoupler, 3 ppm scatter each, 97 mm round trip,
    /// 60 μW per travelling mode.
    pub fn reference_setup() -> Self {
        let curved = MirrorSpec { transmission: 0.8e-6, scatter_loss: 3e-6, curvature_radius: Some(0.2) };
        let incoupler = MirrorSpec { transmission: 23e-6, scatter_loss: 3e-6, curvature_radius: None };
        CavitySpec {
            mirrors: vec![incoupler, curved, curved],
            round_trip_length: 0.097,
            input_power_per_mode: 60e-6,
            mode_matching_efficiency: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.mirrors.len() == 3, || {
            format!("a triangular ring needs exactly 3 mirrors, got {}", self.mirrors.len())
        })?;
        for m in &self.mirrors {
            m.validate()?;
        }
        ensure(self.round_trip_length > 0.0, || {
            format!("round-trip length must be positive, got {}", self.round_trip_length)
        })?;
        ensure(self.input_power_per_mode >= 0.0, || "input power must be non-negative".into())?;
        ensure(
            self.mode_matching_efficiency >= 0.0 && self.mode_matching_efficiency <= 1.0,
            || format!("mode matching must lie in [0, 1], got {}", self.mode_matching_efficiency),
        )?;
        ensure(self.round_trip_loss() < 1.0, || "total round-trip loss must be below 1".into())
    }

    /// Σ (transmission + scatter) over all mirrors.
    pub fn round_trip_loss(&self) -> f64 {
        self.mirrors.iter().map(MirrorSpec::loss).sum()
    }

    /// The mirror with the largest transmission.
    pub fn incoupler(&self) -> &MirrorSpec {
        self.mirrors
            .iter()
            .max_by(|a, b| a.transmission.total_cmp(&b.transmission))
            .expect("validated cavity has mirrors")
    }
}

/// Fundamental Gaussian mode; waists are 1/e² intensity radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    pub waist_sagittal: f64,
    pub waist_transversal: f64,
}

impl ModeGeometry {
    pub fn new(waist_sagittal: f64, waist_transversal: f64) -> Result<Self> {
        ensure(waist_sagittal > 0.0 && waist_transversal > 0.0, || {
            "mode waists must be positive".into()
        })?;
        Ok(ModeGeometry { waist_sagittal, waist_transversal })
    }

    /// Build from 1/e² diameters, the way beam profilers report them.
    pub fn from_diameters(d_sagittal: f64, d_transversal: f64) -> Result<Self> {
        Self::new(d_sagittal / 2.0, d_transversal / 2.0)
    }

    /// 268 μm × 258 μm diameters.
    pub fn reference_setup() -> Self {
        ModeGeometry { waist_sagittal: 134e-6, waist_transversal: 129e-6 }
    }

    /// Geometric-mean waist √(w_s w_t).
    pub fn effective_waist(&self) -> f64 {
        (self.waist_sagittal * self.waist_transversal).sqrt()
    }
}

/// c / L for a ring of round-trip length `L`.
pub fn free_spectral_range(round_trip_length: f64) -> Result<f64> {
    ensure(round_trip_length > 0.0, || {
        format!("round-trip length must be positive, got {round_trip_length}")
    })?;
    Ok(PhysicalConstants::C / round_trip_length)
}

/// FWHM linewidth Δν = 1/(2πτ) from the intensity ring-down time.
pub fn linewidth_from_ring_down(tau: f64) -> Result<f64> {
    ensure(tau > 0.0, || format!("ring-down time must be positive, got {tau}"))?;
    Ok(1.0 / (2.0 * PI * tau))
}

/// Inverse of [`linewidth_from_ring_down`].
pub fn ring_down_from_linewidth(linewidth: f64) -> Result<f64> {
    ensure(linewidth > 0.0, || format!("linewidth must be positive, got {linewidth}"))?;
    Ok(1.0 / (2.0 * PI * linewidth))
}

pub fn finesse_from_linewidth(fsr: f64, linewidth: f64) -> Result<f64> {
    ensure(fsr > 0.0 && linewidth > 0.0, || {
        format!("FSR and linewidth must be positive, got {fsr} and {linewidth}")
    })?;
    Ok(fsr / linewidth)
}

/// 2π / Σloss, the high-finesse limit.
pub fn finesse_from_total_loss(total_loss: f64) -> Result<f64> {
    if total_loss == 0.0 {
        return Err(Error::InvalidInput("zero round-trip loss gives infinite finesse".into()));
    }
    ensure(total_loss > 0.0 && total_loss < 1.0, || {
        format!("round-trip loss must lie in (0, 1), got {total_loss}")
    })?;
    Ok(2.0 * PI / total_loss)
}

pub fn finesse_from_losses(cavity: &CavitySpec) -> Result<f64> {
    finesse_from_total_loss(cavity.round_trip_loss())
}

/// (π/4) w_s w_t L.
pub fn mode_volume(mode: &ModeGeometry, round_trip_length: f64) -> Result<f64> {
    ensure(round_trip_length > 0.0, || "round-trip length must be positive".into())?;
    ensure(mode.waist_sagittal > 0.0 && mode.waist_transversal > 0.0, || {
        "mode waists must be positive".into()
    })?;
    Ok(PI / 4.0 * mode.waist_sagittal * mode.waist_transversal * round_trip_length)
}

/// On-resonance power enhancement η_mm T_in / (Σloss/2)².
pub fn build_up_factor(cavity: &CavitySpec) -> Result<f64> {
    let loss = cavity.round_trip_loss();
    if loss <= 0.0 {
        return Err(Error::InvalidInput("zero round-trip loss gives unbounded build-up".into()));
    }
    let half = loss / 2.0;
    Ok(cavity.mode_matching_efficiency * cavity.incoupler().transmission / (half * half))
}

/// Circulating power per travelling mode.
pub fn circulating_power(cavity: &CavitySpec) -> Result<f64> {
    Ok(cavity.input_power_per_mode * build_up_factor(cavity)?)
}
