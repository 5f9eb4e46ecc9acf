//! Experimental protocols: depth ramps and time-of-flight thermometry.

pub mod ramp;
pub mod tof;

pub use ramp::{adiabatic_final_temperature, ramp_simulate, RampOutcome, RampProfile, RampShape, RethermalizationModel};
pub use tof::{expansion_sigma, fit_expansion, synthesize_expansion, ExpansionFit, ExpansionRecord, ExpansionSeries};
