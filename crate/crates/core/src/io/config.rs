//! Flat `key = value` run configuration.
//!
//! Every key is declared in [`SCHEMA`] with a value kind and, for most keys,
//! a default taken from the reference experiment. Physical keys carry their
//! unit in the name (`trap.depth_uK`, `grid.t_max_s`); the few dimensionless
//! keys are listed in [`DIMENSIONLESS_KEYS`]. Mode sizes are given as beam
//! diameters and halved to waists on read.

use std::collections::BTreeMap;
use std::path::Path;

use crate::cavity::{CavitySpec, MirrorSpec, ModeGeometry};
use crate::constants::{per_cm3_to_per_m3, uk_to_joule, Species};
use crate::error::{Error, Result};
use crate::trap::{CloudShape, TrapParameters, TrapState};

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "LATTICEKIT_CONFIG";

/// Unit suffixes a physical key may end with.
pub const UNIT_SUFFIXES: &[&str] =
    &["_uK", "_nm", "_um", "_mm", "_ms", "_s", "_ppm", "_uW", "_hz", "_per_cm3"];

/// Final key segments that are dimensionless and carry no suffix.
pub const DIMENSIONLESS_KEYS: &[&str] =
    &["atom_number", "n_points", "seed", "mode_matching", "epsilon", "noise_rel", "rethermalization", "epsilon_mode"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Float,
    Int,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: ValueKind,
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn float(key: &'static str, default: Option<&'static str>, doc: &'static str) -> KeySpec {
    KeySpec { key, kind: ValueKind::Float, default, doc }
}

const fn int(key: &'static str, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, kind: ValueKind::Int, default: Some(default), doc }
}

const RETHERMALIZATION: &[&str] = &["gated", "instant", "disabled"];
const EPSILON_MODES: &[&str] = &["fixed", "joint"];

pub const MIRROR_KEYS: &[&str] = &[
    "cavity.mirror_1.transmission_ppm",
    "cavity.mirror_1.scatter_ppm",
    "cavity.mirror_2.transmission_ppm",
    "cavity.mirror_2.scatter_ppm",
    "cavity.mirror_3.transmission_ppm",
    "cavity.mirror_3.scatter_ppm",
];

pub const SCHEMA: &[KeySpec] = &[
    float("cavity.round_trip_length_mm", Some("97"), "ring round-trip length"),
    float("cavity.mirror_1.transmission_ppm", Some("23"), "incoupler transmission"),
    float("cavity.mirror_1.scatter_ppm", Some("3"), "incoupler scatter and absorption"),
    float("cavity.mirror_1.curvature_radius_mm", None, "incoupler radius of curvature; flat when absent"),
    float("cavity.mirror_2.transmission_ppm", Some("0.8"), "transmission"),
    float("cavity.mirror_2.scatter_ppm", Some("3"), "scatter and absorption"),
    float("cavity.mirror_2.curvature_radius_mm", Some("200"), "radius of curvature"),
    float("cavity.mirror_3.transmission_ppm", Some("0.8"), "transmission"),
    float("cavity.mirror_3.scatter_ppm", Some("3"), "scatter and absorption"),
    float("cavity.mirror_3.curvature_radius_mm", Some("200"), "radius of curvature"),
    float("cavity.ring_down_s", Some("9.2e-6"), "measured intensity ring-down time"),
    float("cavity.mode_matching", Some("1"), "input mode-matching efficiency"),
    float("mode.diameter_sagittal_um", Some("268"), "sagittal beam diameter (2 w_s)"),
    float("mode.diameter_transversal_um", Some("258"), "transversal beam diameter (2 w_t)"),
    float("trap.depth_uK", Some("350"), "well depth"),
    float("trap.laser_wavelength_nm", Some("787.6"), "lattice laser wavelength"),
    float("trap.input_power_uW", Some("60"), "pump power per running-wave mode"),
    float("cloud.atom_number", Some("4e6"), "atom number"),
    float("cloud.temperature_uK", Some("123"), "temperature"),
    float("cloud.envelope_sigma_z_um", Some("555.56"), "rms extent of the cloud along the lattice axis"),
    float("cloud.envelope_sigma_x_um", None, "override of the per-well radial width along x"),
    float("cloud.envelope_sigma_y_um", None, "override of the per-well radial width along y"),
    float("loss.gamma_per_s", Some("0.6"), "one-body loss rate"),
    float("loss.beta_cm3_per_s", Some("7.5e-12"), "two-body loss coefficient"),
    float("loss.rho_peak_per_cm3", None, "peak density; computed from the cloud when absent"),
    float("evap.epsilon", Some("0.057"), "temperature-law coefficient"),
    float("heating.gamma_tot_per_s", Some("0"), "total parametric heating rate"),
    float("grid.t_max_s", Some("4"), "end of the simulation grid"),
    int("grid.n_points", "201", "number of grid points including t = 0"),
    float("sim.noise_rel", Some("0"), "relative Gaussian noise added to simulated values"),
    int("sim.seed", "0", "noise seed"),
    float("ramp.depth_final_uK", Some("147"), "final well depth"),
    float("ramp.duration_s", Some("0.07"), "ramp time"),
    KeySpec {
        key: "ramp.rethermalization",
        kind: ValueKind::Choice(RETHERMALIZATION),
        default: Some("gated"),
        doc: "evaporation model during the ramp",
    },
    float("tof.t_min_ms", Some("0.5"), "first expansion time"),
    float("tof.t_max_ms", Some("6"), "last expansion time"),
    int("tof.n_points", "8", "number of expansion images"),
    float("tof.sigma0_um", Some("40"), "initial cloud width"),
    float("tof.noise_rel", Some("0.01"), "relative noise on widths and amplitudes"),
    float("fit.gamma_guess_per_s", Some("0.5"), "initial one-body rate"),
    float("fit.beta_guess_cm3_per_s", Some("5e-12"), "initial two-body coefficient"),
    KeySpec {
        key: "fit.epsilon_mode",
        kind: ValueKind::Choice(EPSILON_MODES),
        default: Some("fixed"),
        doc: "fit epsilon alone or jointly with T0",
    },
    float("bound.t_max_s", Some("4"), "last time of the temperature record"),
];

fn spec_for(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

/// True when the key's last segment ends with a unit suffix or is a known
/// dimensionless name.
pub fn has_unit_discipline(key: &str) -> bool {
    let last = key.rsplit('.').next().unwrap_or(key);
    UNIT_SUFFIXES.iter().any(|s| last.ends_with(s)) || DIMENSIONLESS_KEYS.contains(&last)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Override,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, (String, Source)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let values = SCHEMA
            .iter()
            .filter_map(|s| s.default.map(|d| (s.key, (d.to_string(), Source::Default))))
            .collect();
        RunConfig { values }
    }
}

fn check_value(spec: &KeySpec, raw: &str) -> std::result::Result<(), String> {
    match spec.kind {
        ValueKind::Float => match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(()),
            _ => Err(format!("`{}` expects a finite number, got `{raw}`", spec.key)),
        },
        ValueKind::Int => raw
            .parse::<u64>()
            .map(|_| ())
            .map_err(|_| format!("`{}` expects a non-negative integer, got `{raw}`", spec.key)),
        ValueKind::Choice(options) => {
            if options.contains(&raw) {
                Ok(())
            } else {
                Err(format!("`{}` expects one of {options:?}, got `{raw}`", spec.key))
            }
        }
    }
}

fn unknown_key(key: &str) -> String {
    if has_unit_discipline(key) {
        format!("unknown config key `{key}`")
    } else {
        format!("unknown config key `{key}` (physical keys must end with a unit suffix such as _uK or _mm)")
    }
}

impl RunConfig {
    /// Defaults overlaid with the contents of a config file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut file_keys = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let spec = spec_for(key).ok_or_else(|| parse_err(unknown_key(key)))?;
            if file_keys.contains(&spec.key) {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
            check_value(spec, value).map_err(parse_err)?;
            cfg.values.insert(spec.key, (value.to_string(), Source::File));
            file_keys.push(spec.key);
        }
        // A file that describes any mirror must describe all of them, so a
        // partial mirror set never silently mixes with the defaults.
        if MIRROR_KEYS.iter().any(|k| file_keys.contains(k)) {
            if let Some(missing) = MIRROR_KEYS.iter().find(|k| !file_keys.contains(k)) {
                return Err(Error::InvalidInput(format!("missing config key `{missing}`")));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Resolve a full key or a unique dot-segment suffix of one.
    pub fn resolve_key(name: &str) -> Result<&'static str> {
        if let Some(spec) = spec_for(name) {
            return Ok(spec.key);
        }
        let dotted = format!(".{name}");
        let matches: Vec<&'static str> = SCHEMA.iter().map(|s| s.key).filter(|k| k.ends_with(&dotted)).collect();
        match matches.as_slice() {
            [one] => Ok(one),
            [] => Err(Error::InvalidInput(unknown_key(name))),
            many => Err(Error::InvalidInput(format!("ambiguous config key `{name}` matches {many:?}"))),
        }
    }

    /// Command-line override `--key value`.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let key = Self::resolve_key(name)?;
        let spec = spec_for(key).expect("resolved key is in the schema");
        check_value(spec, value).map_err(Error::InvalidInput)?;
        self.values.insert(key, (value.to_string(), Source::Override));
        Ok(())
    }

    pub fn source(&self, key: &str) -> Option<Source> {
        self.values.get(key).map(|(_, s)| *s)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn lookup(&self, key: &str, kind: &str) -> Result<&str> {
        let spec = spec_for(key).ok_or_else(|| Error::InvalidInput(unknown_key(key)))?;
        let expected = match spec.kind {
            ValueKind::Float => "float",
            ValueKind::Int => "int",
            ValueKind::Choice(_) => "choice",
        };
        debug_assert_eq!(expected, kind, "config key {key} read with the wrong kind");
        self.raw(key).ok_or_else(|| Error::InvalidInput(format!("missing config key `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        Ok(self.lookup(key, "float")?.parse().expect("validated on insert"))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            Some(_) => self.f64(key).map(Some),
            None => {
                spec_for(key).ok_or_else(|| Error::InvalidInput(unknown_key(key)))?;
                Ok(None)
            }
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        Ok(self.lookup(key, "int")?.parse().expect("validated on insert"))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        usize::try_from(self.u64(key)?).map_err(|_| Error::InvalidInput(format!("`{key}` is too large")))
    }

    pub fn choice(&self, key: &str) -> Result<&str> {
        self.lookup(key, "choice")
    }

    /// Every set key with its raw value and origin, in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, &str, Source)> + '_ {
        self.values.iter().map(|(k, (v, s))| (*k, v.as_str(), *s))
    }

    pub fn cavity_spec(&self) -> Result<CavitySpec> {
        let mut mirrors = Vec::with_capacity(3);
        for i in 1..=3 {
            let t = self.f64(&format!("cavity.mirror_{i}.transmission_ppm"))?;
            let s = self.f64(&format!("cavity.mirror_{i}.scatter_ppm"))?;
            let r = self.opt_f64(&format!("cavity.mirror_{i}.curvature_radius_mm"))?.map(|r| r / 1e3);
            mirrors.push(MirrorSpec::from_ppm(t, s, r)?);
        }
        CavitySpec::new(
            mirrors,
            self.f64("cavity.round_trip_length_mm")? / 1e3,
            self.f64("trap.input_power_uW")? / 1e6,
            self.f64("cavity.mode_matching")?,
        )
    }

    pub fn mode_geometry(&self) -> Result<ModeGeometry> {
        ModeGeometry::from_diameters(
            self.f64("mode.diameter_sagittal_um")? / 1e6,
            self.f64("mode.diameter_transversal_um")? / 1e6,
        )
    }

    pub fn trap_parameters(&self, species: &Species) -> Result<TrapParameters> {
        TrapParameters::from_depth(
            uk_to_joule(self.f64("trap.depth_uK")?),
            self.f64("trap.laser_wavelength_nm")? / 1e9,
            self.mode_geometry()?.effective_waist(),
            species,
        )
    }

    pub fn trap_state(&self, species: &Species) -> Result<TrapState> {
        let trap = self.trap_parameters(species)?;
        let temperature = self.f64("cloud.temperature_uK")? / 1e6;
        let envelope = self.f64("cloud.envelope_sigma_z_um")? / 1e6;
        let mut shape = CloudShape::thermal(&trap, temperature, envelope, species)?;
        if let Some(sx) = self.opt_f64("cloud.envelope_sigma_x_um")? {
            shape.per_well_sigmas[0] = sx / 1e6;
        }
        if let Some(sy) = self.opt_f64("cloud.envelope_sigma_y_um")? {
            shape.per_well_sigmas[1] = sy / 1e6;
        }
        TrapState::new(self.f64("cloud.atom_number")?, temperature, trap, shape)
    }

    /// Configured peak density (m⁻³), or the value implied by the cloud.
    pub fn rho_peak(&self, species: &Species) -> Result<f64> {
        match self.opt_f64("loss.rho_peak_per_cm3")? {
            Some(rho) => Ok(per_cm3_to_per_m3(rho)),
            None => crate::trap::peak_density(&self.trap_state(species)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::RB85;

    #[test]
    fn schema_keys_follow_unit_discipline() {
        for s in SCHEMA {
            assert!(has_unit_discipline(s.key), "{}", s.key);
            if let Some(d) = s.default {
                check_value(s, d).unwrap();
            }
        }
        assert!(!has_unit_discipline("trap.depth"));
    }

    #[test]
    fn defaults_reproduce_reference_setup() {
        let c = RunConfig::default();
        let cav = c.cavity_spec().unwrap();
        assert_eq!(cav, CavitySpec::reference_setup());
        let m = c.mode_geometry().unwrap();
        assert!((m.waist_sagittal - 134e-6).abs() < 1e-18);
        let rho = c.rho_peak(&RB85).unwrap();
        assert!((rho / 9e17 - 1.0).abs() < 1e-3, "{rho}");
    }

    #[test]
    fn parse_comments_and_overrides() {
        let c = RunConfig::parse("# header\ntrap.depth_uK = 100  # shallower\n\ngrid.n_points=11\n").unwrap();
        assert_eq!(c.f64("trap.depth_uK").unwrap(), 100.0);
        assert_eq!(c.source("trap.depth_uK"), Some(Source::File));
        assert_eq!(c.usize("grid.n_points").unwrap(), 11);
        let mut c = c;
        c.set("round_trip_length_mm", "194").unwrap();
        assert_eq!(c.f64("cavity.round_trip_length_mm").unwrap(), 194.0);
        assert_eq!(c.source("cavity.round_trip_length_mm"), Some(Source::Override));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match RunConfig::parse("trap.depth_uK = 1\nbogus.key_uK = 3\n") {
            Err(Error::Parse { line: 2, message }) => assert!(message.contains("bogus.key_uK")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::parse("trap.depth_uK = abc"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RunConfig::parse("no equals sign"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RunConfig::parse("a_uK=1\n"), Err(Error::Parse { .. })));
        assert!(matches!(RunConfig::parse("grid.n_points = 1\ngrid.n_points = 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(RunConfig::parse("ramp.rethermalization = maybe"), Err(Error::Parse { .. })));
    }

    #[test]
    fn partial_mirror_set_names_missing_key() {
        let text = MIRROR_KEYS[..5].iter().map(|k| format!("{k} = 1\n")).collect::<String>();
        match RunConfig::parse(&text) {
            Err(Error::InvalidInput(m)) => assert!(m.contains("cavity.mirror_3.scatter_ppm"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn override_resolution() {
        let mut c = RunConfig::default();
        assert!(c.set("transmission_ppm", "1").is_err());
        assert!(c.set("nonexistent_s", "1").is_err());
        assert!(c.set("depth_uK", "-").is_err());
        c.set("mirror_2.transmission_ppm", "1.5").unwrap();
        assert_eq!(c.f64("cavity.mirror_2.transmission_ppm").unwrap(), 1.5);
    }

    #[test]
    fn radial_width_overrides() {
        let mut c = RunConfig::default();
        let base = c.rho_peak(&RB85).unwrap();
        let sx = c.trap_state(&RB85).unwrap().shape().per_well_sigmas[0];
        c.set("envelope_sigma_x_um", &format!("{}", 2.0 * sx * 1e6)).unwrap();
        assert!((c.rho_peak(&RB85).unwrap() / base - 0.5).abs() < 1e-9);
        c.set("rho_peak_per_cm3", "1e12").unwrap();
        assert_eq!(c.rho_peak(&RB85).unwrap(), 1e18);
    }
}
