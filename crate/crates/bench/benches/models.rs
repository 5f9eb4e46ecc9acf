use criterion::{black_box, criterion_group, criterion_main, Criterion};
use latticekit::constants::{uk_to_joule, RB85};
use latticekit::estimation::{fit_decay, fit_epsilon, DecayGuess};
use latticekit::evaporation;
use latticekit::heating::{bound_gamma_tot, combined_temperature_ode};
use latticekit::io::RunConfig;
use latticekit::loss::{self, ConstantTemperature, LossParams};
use latticekit::ode::uniform_grid;
use latticekit::protocols::ramp::{ramp_simulate, RampProfile, RethermalizationModel};
use latticekit::protocols::tof::fit_expansion;
use latticekit::trap::DensityConvention;
use latticekit_bench::{clean_temperature, noisy_decay, reference_rho_peak, tof_series, REFERENCE_TEMPERATURE};

fn models(c: &mut Criterion) {
    let grid = uniform_grid(4.0, 201).unwrap();
    let rho = reference_rho_peak();
    let params = LossParams::from_beta(0.6, 7.5e-18, rho).unwrap();
    let closure = ConstantTemperature { rho_peak0: rho, n0: 4e6, convention: DensityConvention::Lattice };

    c.bench_function("epsilon", |b| b.iter(|| evaporation::epsilon(black_box(2.85)).unwrap()));
    c.bench_function("decay_rk4_201", |b| {
        b.iter(|| loss::integrate_decay(4e6, params, &closure, black_box(&grid)).unwrap())
    });
    c.bench_function("combined_ode_201", |b| {
        b.iter(|| combined_temperature_ode(REFERENCE_TEMPERATURE, black_box(0.002), &grid).unwrap())
    });
    c.bench_function("heating_bound", |b| b.iter(|| bound_gamma_tot(REFERENCE_TEMPERATURE, black_box(4.0)).unwrap()));

    let state = RunConfig::default().trap_state(&RB85).unwrap();
    let profile = RampProfile::linear(uk_to_joule(350.0), uk_to_joule(147.0), 0.07).unwrap();
    c.bench_function("ramp_70ms", |b| {
        b.iter(|| ramp_simulate(black_box(&state), &profile, RethermalizationModel::Gated, &RB85).unwrap())
    });
}

fn fits(c: &mut Criterion) {
    let rho = reference_rho_peak();
    let decay = noisy_decay(1);
    let guess = DecayGuess { gamma: 0.5, beta: 5e-18, n0: None };
    c.bench_function("fit_decay", |b| b.iter(|| fit_decay(black_box(&decay), rho, &guess).unwrap()));

    let temps = clean_temperature();
    let p = REFERENCE_TEMPERATURE;
    c.bench_function("fit_epsilon", |b| b.iter(|| fit_epsilon(black_box(&temps), p.xi, p.gamma, p.t0).unwrap()));

    let series = tof_series(3);
    c.bench_function("fit_expansion", |b| b.iter(|| fit_expansion(black_box(&series), &RB85).unwrap()));
}

criterion_group!(benches, models, fits);
criterion_main!(benches);
