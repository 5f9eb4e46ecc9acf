//! Shared inputs for the benchmarks.

use latticekit::constants::{per_cm3_to_per_m3, RB85};
use latticekit::estimation::{with_relative_noise, Dataset, DatasetKind};
use latticekit::loss;
use latticekit::protocols::tof::{synthesize_expansion, ExpansionSeries};
use latticekit::TemperatureParams;

/// Peak density of the reference cloud (m⁻³).
pub fn reference_rho_peak() -> f64 {
    per_cm3_to_per_m3(9e11)
}

pub const REFERENCE_TEMPERATURE: TemperatureParams =
    TemperatureParams { t0: 123e-6, epsilon: 0.057, xi: 2.80, gamma: 0.6 };

/// Twenty-point population trace with 3 % relative noise.
pub fn noisy_decay(seed: u64) -> Dataset {
    let xi = loss::xi_from_beta(7.5e-18, reference_rho_peak(), 0.6).expect("valid loss parameters");
    let clean: Vec<(f64, f64)> = (1..=20)
        .map(|i| {
            let t = 0.2 * i as f64;
            (t, loss::population(t, 4e6, 0.6, xi).expect("valid time"))
        })
        .collect();
    let noisy = with_relative_noise(&clean, 0.03, seed).expect("valid noise level");
    Dataset::from_pairs(&noisy, DatasetKind::Population).expect("positive samples")
}

/// Twenty-point temperature trace following the reference law.
pub fn clean_temperature() -> Dataset {
    let p = REFERENCE_TEMPERATURE;
    let pairs: Vec<(f64, f64)> = (1..=20)
        .map(|i| {
            let t = 0.2 * i as f64;
            (t, latticekit::evaporation::temperature(t, p.t0, p.epsilon, p.xi, p.gamma).expect("valid time"))
        })
        .collect();
    Dataset::from_pairs(&pairs, DatasetKind::Temperature).expect("positive samples")
}

/// Eight expansion times from 0.5 to 6 ms with 1 % noise.
pub fn tof_series(seed: u64) -> ExpansionSeries {
    let times: Vec<f64> = (0..8).map(|i| 0.5e-3 + 5.5e-3 * i as f64 / 7.0).collect();
    synthesize_expansion(4e6, 123e-6, 40e-6, &times, 0.01, seed, &RB85).expect("valid series")
}
