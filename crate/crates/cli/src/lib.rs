//! Command-line front end: configuration loading, subcommands and the
//! exit-code contract.
//!
//! Any `--key value` (or `--key=value`) whose key names a configuration entry,
//! in full or by unique suffix, overrides the configuration. It is pulled out
//! of the argument list before the remaining flags reach clap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use latticekit::cavity::{self, build_up_factor, circulating_power, finesse_from_linewidth, finesse_from_losses};
use latticekit::constants::{joule_to_uk, per_m3_to_per_cm3, uk_to_joule, RB85};
use latticekit::estimation::{self, fit_decay, fit_epsilon_with, residual_report, DecayGuess, EpsilonFitMode};
use latticekit::evaporation::{self, TemperatureTrajectory};
use latticekit::heating::{bound_gamma_tot, combined_temperature_ode, rates_from_spectrum};
use latticekit::io::report::{Provenance, Report};
use latticekit::io::{tables, write_atomic, RunConfig, CONFIG_ENV};
use latticekit::loss::{LossParams, PopulationTrajectory};
use latticekit::ode::uniform_grid;
use latticekit::protocols::{fit_expansion, ramp_simulate, synthesize_expansion, RampProfile, RethermalizationModel};
use latticekit::trap::{self, classify_regimes, DensityConvention};
use latticekit::{Error, Result, TemperatureParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_FIT: i32 = 4;

/// Exit code for an error: 2 input/config, 3 model domain, 4 fit failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) => EXIT_INPUT,
        Error::Domain(_) | Error::StepUnderflow { .. } => EXIT_DOMAIN,
        Error::NonConvergence { .. } | Error::Degenerate(_) => EXIT_FIT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "latticekit", version, about = "Cavity, trap, loss and evaporation toolkit for a ring-cavity optical lattice")]
pub struct Cli {
    /// Configuration file (`key = value` lines). Defaults to $LATTICEKIT_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Free spectral range, linewidth, both finesse routes, mode volume, build-up.
    Cavity(ReportArgs),
    /// Secular frequencies, regimes, densities and cavity coupling.
    Trap(ReportArgs),
    /// Write a model trajectory as CSV.
    Simulate(SimulateArgs),
    /// Fit a measured series.
    Fit(FitArgs),
    /// Upper bound on the parametric heating rate.
    Bound(BoundArgs),
    /// Synthesize and fit a time-of-flight series.
    Tof(ReportArgs),
    /// Simulate a well-depth ramp.
    Ramp(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Write the machine-readable report (or series, for `tof`) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModel {
    Decay,
    Temperature,
    Combined,
    Ramp,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: SimModel,
    /// Output CSV; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Decay,
    Temperature,
    Tof,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub kind: FitKind,
    /// Input CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Fitted parameters as `param,value,uncertainty`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-point residuals.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    /// Decay-fit parameters (`gamma_per_s`, `xi`) for the temperature fit.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Fitted parameters (`gamma_per_s`, `xi`, `epsilon`); configuration otherwise.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Relative intensity noise spectrum, `freq_hz,S_rel_per_hz`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const CLI_FLAGS: &[&str] = &["config", "out", "model", "kind", "data", "residuals", "params", "spectrum", "help", "version"];

/// Configuration overrides as `(key, value)` pairs.
pub type Overrides = Vec<(String, String)>;

/// Split configuration overrides from the arguments clap understands.
pub fn split_overrides(args: Vec<OsString>) -> Result<(Vec<OsString>, Overrides)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(flag) = arg.to_str().and_then(|s| s.strip_prefix("--")).map(str::to_string) else {
            rest.push(arg);
            continue;
        };
        let (name, inline) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (flag.clone(), None),
        };
        if name.is_empty() || CLI_FLAGS.contains(&name.as_str()) {
            rest.push(arg);
            continue;
        }
        let key = RunConfig::resolve_key(&name)?;
        let value = match inline {
            Some(v) => v,
            None => iter
                .next()
                .and_then(|v| v.into_string().ok())
                .ok_or_else(|| Error::InvalidInput(format!("override --{name} needs a value")))?,
        };
        overrides.push((key.to_string(), value));
    }
    Ok((rest, overrides))
}

pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let mut cfg = match path.or(env_path.as_deref()) {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn write_output(path: Option<&Path>, contents: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => stdout.write_all(contents.as_bytes()).map_err(Error::from),
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run(argv: Vec<OsString>, stdout: &mut dyn Write) -> Result<()> {
    let (rest, overrides) = split_overrides(argv.into_iter().skip(1).collect())?;
    let cli = match Cli::try_parse_from(std::iter::once(OsString::from("latticekit")).chain(rest)) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(stdout, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(Error::InvalidInput(e.to_string())),
    };
    let cfg = load_config(cli.config.as_deref(), &overrides)?;
    execute(&cli.command, &cfg, stdout)
}

pub fn execute(command: &Command, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Cavity(a) => emit_report(&cavity_report(cfg)?, a.out.as_deref(), stdout),
        Command::Trap(a) => emit_report(&trap_report(cfg)?, a.out.as_deref(), stdout),
        Command::Ramp(a) => emit_report(&ramp_report(cfg)?, a.out.as_deref(), stdout),
        Command::Simulate(a) => simulate(cfg, a, stdout),
        Command::Fit(a) => fit(cfg, a, stdout),
        Command::Bound(a) => emit_report(&bound_report(cfg, a)?, a.out.as_deref(), stdout),
        Command::Tof(a) => tof(cfg, a, stdout),
    }
}

fn emit_report(report: &Report, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    stdout.write_all(report.to_text().as_bytes())?;
    if let Some(p) = out {
        write_atomic(p, &report.to_csv())?;
    }
    Ok(())
}

pub fn cavity_report(cfg: &RunConfig) -> Result<Report> {
    let cav = cfg.cavity_spec()?;
    let mode = cfg.mode_geometry()?;
    let tau = cfg.f64("cavity.ring_down_s")?;
    let fsr = cavity::free_spectral_range(cav.round_trip_length)?;
    let linewidth = cavity::linewidth_from_ring_down(tau)?;
    let f_lw = finesse_from_linewidth(fsr, linewidth)?;
    let f_loss = finesse_from_losses(&cav)?;
    let mut r = Report::new();
    r.section("cavity")
        .configured("round_trip_length_mm", cav.round_trip_length * 1e3, "mm")
        .configured("ring_down_us", tau * 1e6, "us")
        .computed("fsr_GHz", fsr / 1e9, "GHz")
        .computed("linewidth_kHz", linewidth / 1e3, "kHz")
        .computed("round_trip_loss_ppm", cav.round_trip_loss() * 1e6, "ppm")
        .computed("finesse_linewidth", f_lw, "1")
        .computed("finesse_losses", f_loss, "1")
        .computed("finesse_ratio", f_lw / f_loss, "1")
        .computed("mode_volume_mm3", cavity::mode_volume(&mode, cav.round_trip_length)? * 1e9, "mm3")
        .computed("build_up", build_up_factor(&cav)?, "1")
        .computed("circulating_power_W", circulating_power(&cav)?, "W");
    Ok(r)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn trap_report(cfg: &RunConfig) -> Result<Report> {
    let species = RB85;
    let tp = cfg.trap_parameters(&species)?;
    let state = cfg.trap_state(&species)?;
    let flags = classify_regimes(&tp, &species);
    let mut r = Report::new();
    r.section("trap")
        .configured("depth_uK", tp.depth_uk(), "uK")
        .configured("laser_wavelength_nm", tp.lattice_wavelength * 1e9, "nm")
        .computed("waist_um", tp.waist * 1e6, "um")
        .computed("axial_frequency_kHz", tp.axial_frequency / 1e3, "kHz")
        .computed("radial_frequency_Hz", tp.radial_frequency, "Hz")
        .computed("recoil_frequency_kHz", species.recoil_frequency(tp.lattice_wavelength) / 1e3, "kHz")
        .computed("scattering_rate_per_s", tp.scattering_rate, "1/s")
        .computed("depth_per_scatter_uK_s", tp.depth_uk() / tp.scattering_rate, "uK s")
        .text("lamb_dicke_axial", yes_no(flags.lamb_dicke_axial), Provenance::Computed)
        .text("lamb_dicke_radial", yes_no(flags.lamb_dicke_radial), Provenance::Computed)
        .text("strong_confinement_axial", yes_no(flags.strong_confinement_axial), Provenance::Computed)
        .text("strong_confinement_radial", yes_no(flags.strong_confinement_radial), Provenance::Computed);

    let rho = cfg.rho_peak(&species)?;
    let rho_source = if cfg.raw("loss.rho_peak_per_cm3").is_some() { Provenance::Configured } else { Provenance::Computed };
    r.section("cloud")
        .configured("atom_number", state.atom_number(), "1")
        .configured("temperature_uK", state.temperature() * 1e6, "uK")
        .computed("eta", state.eta(), "1")
        .number("rho_peak_per_cm3", per_m3_to_per_cm3(rho), "1/cm3", rho_source)
        .computed("mean_density_per_cm3", per_m3_to_per_cm3(trap::mean_density(&state, DensityConvention::Lattice)?), "1/cm3")
        .computed("phase_space_density", trap::phase_space_density(rho, state.temperature(), &species)?, "1")
        .text("wells_resolved", yes_no(state.shape().wells_resolved()), Provenance::Computed);

    let cav = cfg.cavity_spec()?;
    let mode = cfg.mode_geometry()?;
    let fsr = cavity::free_spectral_range(cav.round_trip_length)?;
    let finesse = finesse_from_linewidth(fsr, cavity::linewidth_from_ring_down(cfg.f64("cavity.ring_down_s")?)?)?;
    let alpha = trap::polarizability(tp.lattice_wavelength, &species)?;
    let intensity = trap::lattice_peak_intensity(circulating_power(&cav)?, mode.waist_sagittal, mode.waist_transversal);
    let implied = trap::dipole_depth_and_scatter(intensity, tp.lattice_wavelength, &species)?.depth();
    r.section("coupling")
        .computed("polarizability_SI", alpha, "C m2/V")
        .computed("reflectivity_per_atom", trap::reflectivity_per_atom(alpha, tp.lattice_wavelength, tp.waist), "1")
        .computed(
            "collective_coupling",
            trap::collective_coupling(alpha, tp.lattice_wavelength, tp.waist, state.atom_number(), finesse)?,
            "1",
        )
        .configured("input_power_uW", cav.input_power_per_mode * 1e6, "uW")
        .computed("depth_from_power_uK", joule_to_uk(implied), "uK")
        .computed("implied_efficiency", tp.well_depth / implied, "1");
    Ok(r)
}

/// (γ, ξ) from a parameter file when given, else from the configuration.
fn loss_parameters(cfg: &RunConfig, params: Option<&[(String, f64, f64)]>) -> Result<(f64, f64)> {
    let lookup = |name: &str| params.and_then(|p| p.iter().find(|(n, _, _)| n == name).map(|(_, v, _)| *v));
    let gamma = match lookup("gamma_per_s") {
        Some(g) => g,
        None => cfg.f64("loss.gamma_per_s")?,
    };
    let xi = match lookup("xi") {
        Some(x) => x,
        None => latticekit::loss::xi_from_beta(cfg.f64("loss.beta_cm3_per_s")? * 1e-6, cfg.rho_peak(&RB85)?, gamma)?,
    };
    Ok((gamma, xi))
}

fn read_params(path: Option<&Path>) -> Result<Option<Vec<(String, f64, f64)>>> {
    path.map(|p| tables::parse_fit_parameters(&tables::read_to_string(p)?)).transpose()
}

fn temperature_params(cfg: &RunConfig, params: Option<&[(String, f64, f64)]>) -> Result<TemperatureParams> {
    let (gamma, xi) = loss_parameters(cfg, params)?;
    let epsilon = match params.and_then(|p| p.iter().find(|(n, _, _)| n == "epsilon")) {
        Some((_, v, _)) => *v,
        None => cfg.f64("evap.epsilon")?,
    };
    Ok(TemperatureParams { t0: cfg.f64("cloud.temperature_uK")? * 1e-6, epsilon, xi, gamma })
}

fn simulate(cfg: &RunConfig, args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.model == SimModel::Ramp {
        return emit_report(&ramp_report(cfg)?, args.out.as_deref(), stdout);
    }
    let grid = uniform_grid(cfg.f64("grid.t_max_s")?, cfg.usize("grid.n_points")?)?;
    let noise = cfg.f64("sim.noise_rel")?;
    let seed = cfg.u64("sim.seed")?;
    let csv = match args.model {
        SimModel::Decay => {
            let (gamma, _) = loss_parameters(cfg, None)?;
            let params = LossParams::from_beta(gamma, cfg.f64("loss.beta_cm3_per_s")? * 1e-6, cfg.rho_peak(&RB85)?)?;
            let traj = PopulationTrajectory::closed_form(cfg.f64("cloud.atom_number")?, params, &grid)?;
            tables::population_csv(&estimation::with_relative_noise(&traj.samples, noise, seed)?)
        }
        SimModel::Temperature => {
            let traj = TemperatureTrajectory::closed_form(temperature_params(cfg, None)?, &grid)?;
            tables::temperature_csv(&estimation::with_relative_noise(&traj.samples, noise, seed)?)
        }
        SimModel::Combined => {
            let traj = combined_temperature_ode(temperature_params(cfg, None)?, cfg.f64("heating.gamma_tot_per_s")?, &grid)?;
            tables::temperature_csv(&estimation::with_relative_noise(&traj.samples, noise, seed)?)
        }
        SimModel::Ramp => unreachable!("handled above"),
    };
    write_output(args.out.as_deref(), &csv, stdout)
}

pub fn ramp_report(cfg: &RunConfig) -> Result<Report> {
    let species = RB85;
    let state = cfg.trap_state(&species)?;
    let u_i = uk_to_joule(cfg.f64("trap.depth_uK")?);
    let u_f = uk_to_joule(cfg.f64("ramp.depth_final_uK")?);
    let duration = cfg.f64("ramp.duration_s")?;
    let model = match cfg.choice("ramp.rethermalization")? {
        "instant" => RethermalizationModel::Instant,
        "disabled" => RethermalizationModel::Disabled,
        _ => RethermalizationModel::Gated,
    };
    let outcome = ramp_simulate(&state, &RampProfile::linear(u_i, u_f, duration)?, model, &species)?;
    let mut r = Report::new();
    r.section("ramp")
        .configured("depth_initial_uK", joule_to_uk(u_i), "uK")
        .configured("depth_final_uK", joule_to_uk(u_f), "uK")
        .configured("duration_s", duration, "s")
        .text("rethermalization", cfg.choice("ramp.rethermalization")?, Provenance::Configured)
        .configured("T_initial_uK", state.temperature() * 1e6, "uK")
        .computed("T_final_uK", outcome.final_temperature * 1e6, "uK")
        .computed("N_final", outcome.final_atom_number, "1")
        .computed("adiabatic_reference_uK", outcome.adiabatic_reference * 1e6, "uK")
        .computed("eta_final", outcome.final_eta, "1")
        .text("quasi_static", yes_no(outcome.quasi_static), Provenance::Computed);
    Ok(r)
}

fn fit(cfg: &RunConfig, args: &FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let text = tables::read_to_string(&args.data)?;
    if args.kind == FitKind::Tof {
        let f = fit_expansion(&tables::parse_expansion(&text)?, &RB85)?;
        let mut r = Report::new();
        r.section("tof_fit")
            .computed("T_uK", f.temperature * 1e6, "uK")
            .computed("T_err_uK", f.temperature_err * 1e6, "uK")
            .computed("sigma0_um", f.sigma0 * 1e6, "um")
            .computed("sigma0_err_um", f.sigma0_err * 1e6, "um")
            .computed("atom_number", f.atom_number, "1")
            .computed("atom_number_err", f.atom_number_err, "1");
        stdout.write_all(r.to_text().as_bytes())?;
        if let Some(p) = &args.out {
            let rows = [
                ("T_uK", f.temperature * 1e6, f.temperature_err * 1e6),
                ("sigma0_um", f.sigma0 * 1e6, f.sigma0_err * 1e6),
                ("atom_number", f.atom_number, f.atom_number_err),
            ];
            let mut csv = tables::FIT_HEADER.join(",") + "\n";
            for (n, v, e) in rows {
                csv.push_str(&format!("{n},{},{}\n", tables::fmt_shortest(v), tables::fmt_shortest(e)));
            }
            write_atomic(p, &csv)?;
        }
        return Ok(());
    }

    let (data, result, extra) = match args.kind {
        FitKind::Decay => {
            let data = tables::parse_population(&text)?;
            let guess = DecayGuess {
                gamma: cfg.f64("fit.gamma_guess_per_s")?,
                beta: cfg.f64("fit.beta_guess_cm3_per_s")? * 1e-6,
                n0: None,
            };
            let rho = cfg.rho_peak(&RB85)?;
            let result = fit_decay(&data, rho, &guess)?;
            (data, result, vec![("rho_peak_per_cm3", per_m3_to_per_cm3(rho), "1/cm3")])
        }
        FitKind::Temperature => {
            let data = tables::parse_temperature(&text)?;
            let params = read_params(args.params.as_deref())?;
            let tp = temperature_params(cfg, params.as_deref())?;
            let mode = match cfg.choice("fit.epsilon_mode")? {
                "joint" => EpsilonFitMode::Joint,
                _ => EpsilonFitMode::EpsilonOnly,
            };
            let result = fit_epsilon_with(&data, tp.xi, tp.gamma, tp.t0, mode)?;
            let eta = evaporation::eta(uk_to_joule(cfg.f64("trap.depth_uK")?), tp.t0)?;
            let computed = evaporation::epsilon(eta)?;
            let fitted = result.value("epsilon").unwrap_or(f64::NAN);
            (data, result, vec![("eta", eta, "1"), ("epsilon_computed", computed, "1"), ("computed_over_fitted", computed / fitted, "1")])
        }
        FitKind::Tof => unreachable!("handled above"),
    };

    let residuals = residual_report(&result, &data)?;
    let mut r = Report::new();
    let s = r.section("fit");
    for p in &result.parameters {
        let (name, scale) = tables::lab_unit_name(p.name);
        s.computed(&name, p.value * scale, p.unit_label());
        s.computed(&format!("{name}_err"), p.uncertainty * scale, p.unit_label());
    }
    for (name, v, unit) in extra {
        s.computed(name, v, unit);
    }
    s.computed("rss", result.rss, "1")
        .computed("reduced_chi_squared", residuals.reduced_chi_squared, "1")
        .computed("iterations", result.iterations as f64, "1")
        .text("converged", yes_no(result.converged), Provenance::Computed)
        .text("at_boundary", yes_no(result.at_boundary), Provenance::Computed);
    stdout.write_all(r.to_text().as_bytes())?;
    if let Some(p) = &args.out {
        write_atomic(p, &tables::fit_csv(&result))?;
    }
    if let Some(p) = &args.residuals {
        write_atomic(p, &tables::residual_csv(&residuals))?;
    }
    if !result.converged {
        return Err(Error::NonConvergence { iterations: result.iterations, rss: result.rss });
    }
    Ok(())
}

trait UnitLabel {
    fn unit_label(&self) -> &'static str;
}

impl UnitLabel for estimation::FitParameter {
    fn unit_label(&self) -> &'static str {
        match self.name {
            "beta" => "cm3/s",
            "T0" => "uK",
            _ => self.unit,
        }
    }
}

pub fn bound_report(cfg: &RunConfig, args: &BoundArgs) -> Result<Report> {
    let params = read_params(args.params.as_deref())?;
    let tp = temperature_params(cfg, params.as_deref())?;
    let t_max = cfg.f64("bound.t_max_s")?;
    let b = bound_gamma_tot(tp, t_max)?;
    let source = if params.is_some() { Provenance::Computed } else { Provenance::Configured };
    let mut r = Report::new();
    let s = r.section("bound");
    s.number("gamma_per_s", tp.gamma, "1/s", source)
        .number("xi", tp.xi, "1", source)
        .number("epsilon", tp.epsilon, "1", source)
        .configured("t_max_s", t_max, "s")
        .computed("gamma_tot_bound_per_s", b.bound, "1/s")
        .computed("t_at_min_s", b.t_at_min, "s")
        .computed("e_folding_s", b.e_folding_time(), "s");
    if let Some(path) = &args.spectrum {
        let spectrum = tables::parse_spectrum(&tables::read_to_string(path)?)?;
        let tp_trap = cfg.trap_parameters(&RB85)?;
        let rates = rates_from_spectrum(&spectrum, tp_trap.axial_frequency, tp_trap.radial_frequency)?;
        r.section("spectrum")
            .computed("gamma_axial_per_s", rates.gamma_a, "1/s")
            .computed("gamma_radial_per_s", rates.gamma_r, "1/s")
            .computed("gamma_tot_per_s", rates.gamma_tot, "1/s")
            .computed("e_folding_s", rates.e_folding_time.unwrap_or(f64::INFINITY), "s")
            .computed("ratio_to_bound", rates.gamma_tot / b.bound, "1");
    }
    Ok(r)
}

fn tof(cfg: &RunConfig, args: &ReportArgs, stdout: &mut dyn Write) -> Result<()> {
    let n = cfg.usize("tof.n_points")?;
    let (t0, t1) = (cfg.f64("tof.t_min_ms")? * 1e-3, cfg.f64("tof.t_max_ms")? * 1e-3);
    if n < 2 || t1 <= t0 {
        return Err(Error::InvalidInput("tof needs n_points >= 2 and t_max_ms > t_min_ms".into()));
    }
    let times: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
    let truth_t = cfg.f64("cloud.temperature_uK")? * 1e-6;
    let series = synthesize_expansion(
        cfg.f64("cloud.atom_number")?,
        truth_t,
        cfg.f64("tof.sigma0_um")? * 1e-6,
        &times,
        cfg.f64("tof.noise_rel")?,
        cfg.u64("sim.seed")?,
        &RB85,
    )?;
    let f = fit_expansion(&series, &RB85)?;
    let mut r = Report::new();
    r.section("tof")
        .configured("T_true_uK", truth_t * 1e6, "uK")
        .computed("T_fit_uK", f.temperature * 1e6, "uK")
        .computed("T_err_uK", f.temperature_err * 1e6, "uK")
        .computed("T_relative_error", (f.temperature - truth_t) / truth_t, "1")
        .computed("sigma0_um", f.sigma0 * 1e6, "um")
        .computed("atom_number", f.atom_number, "1")
        .computed("center_drop_final_mm", series.center_drop.last().copied().unwrap_or(0.0) * 1e3, "mm");
    stdout.write_all(r.to_text().as_bytes())?;
    if let Some(p) = &args.out {
        write_atomic(p, &tables::expansion_csv(&series))?;
    }
    Ok(())
}
