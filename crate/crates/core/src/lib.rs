//! Models, fits and I/O for cold atoms in an optical lattice formed inside a
//! high-finesse ring cavity.
//!
//! Everything is SI internally. Microkelvin, cm³/s and similar lab units
//! appear only at the I/O boundary ([`io`]) and in the conversion helpers of
//! [`constants`].

pub mod cavity;
pub mod constants;
pub mod error;
pub mod estimation;
pub mod evaporation;
pub mod heating;
pub mod io;
pub mod loss;
pub mod ode;
pub mod protocols;
pub mod quadrature;
pub mod trap;

pub use cavity::{CavitySpec, MirrorSpec, ModeGeometry};
pub use constants::{PhysicalConstants, Species, RB85};
pub use error::{Error, Result};
pub use estimation::{Dataset, DatasetKind, FitResult};
pub use evaporation::{PacRegime, PacState, TemperatureParams};
pub use heating::{HeatingBound, HeatingRates, NoiseSpectrum};
pub use loss::LossParams;
pub use trap::{DensityConvention, TrapParameters, TrapState};
