//! CSV readers and writers. Headers are mandatory and checked exactly.
//!
//! Trajectories are written with nine significant digits; every other table
//! uses the shortest decimal string that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::{DataPoint, Dataset, DatasetKind, FitResult, ResidualReport};
use crate::heating::NoiseSpectrum;
use crate::protocols::tof::{ExpansionRecord, ExpansionSeries};

pub const POPULATION_HEADER: &[&str] = &["t_s", "N"];
pub const POPULATION_SIGMA_HEADER: &[&str] = &["t_s", "N", "sigma_N"];
pub const TEMPERATURE_HEADER: &[&str] = &["t_s", "T_uK"];
pub const TEMPERATURE_SIGMA_HEADER: &[&str] = &["t_s", "T_uK", "sigma_uK"];
pub const SPECTRUM_HEADER: &[&str] = &["freq_hz", "S_rel_per_hz"];
pub const EXPANSION_HEADER: &[&str] = &["t_ms", "sigma_um", "amplitude"];
pub const FIT_HEADER: &[&str] = &["param", "value", "uncertainty"];
pub const RESIDUAL_HEADER: &[&str] = &["t", "data", "model", "weighted_residual"];

/// Nine significant digits in scientific notation.
pub fn fmt_trajectory(v: f64) -> String {
    format!("{v:.8e}")
}

/// Shortest round-trip decimal.
pub fn fmt_shortest(v: f64) -> String {
    format!("{v}")
}

/// Rows of a parsed numeric table with their
/// 1-based line numbers.
struct Table {
    rows: Vec<(usize, Vec<f64>)>,
}

fn read_numeric(text: &str, accepted: &[&[&str]]) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse { line: 1, message: "missing header".into() });
    }
    let width = accepted
        .iter()
        .find(|h| h.iter().eq(header.iter()))
        .map(|h| h.len())
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("header `{}` does not match expected `{}`", header.join(","), accepted[0].join(",")),
        })?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Parse { line, message: format!("expected {width} fields, found {}", record.len()) });
        }
        let values = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { line, message: format!("`{f}` is not a finite number") })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    Ok(Table { rows })
}

fn dataset_from(table: Table, kind: DatasetKind, scale: f64) -> Result<Dataset> {
    let mut points = Vec::with_capacity(table.rows.len());
    let mut last_t = f64::NEG_INFINITY;
    for (line, row) in &table.rows {
        let err = |message: String| Error::Parse { line: *line, message };
        if row[0] < 0.0 || row[0] <= last_t {
            return Err(err(format!("time {} must be non-negative and strictly increasing", row[0])));
        }
        if row[1] <= 0.0 {
            return Err(err(format!("value {} must be positive", row[1])));
        }
        let sigma = row.get(2).copied();
        if sigma.is_some_and(|s| s <= 0.0) {
            return Err(err("uncertainty must be positive".into()));
        }
        last_t = row[0];
        points.push(DataPoint { t: row[0], value: row[1] * scale, sigma: sigma.map(|s| s * scale) });
    }
    Dataset::new(points, kind)
}

/// `t_s,N[,sigma_N]`.
pub fn parse_population(text: &str) -> Result<Dataset> {
    dataset_from(read_numeric(text, &[POPULATION_HEADER, POPULATION_SIGMA_HEADER])?, DatasetKind::Population, 1.0)
}

/// `t_s,T_uK[,sigma_uK]`; values are returned in kelvin.
pub fn parse_temperature(text: &str) -> Result<Dataset> {
    dataset_from(read_numeric(text, &[TEMPERATURE_HEADER, TEMPERATURE_SIGMA_HEADER])?, DatasetKind::Temperature, 1e-6)
}

/// `freq_hz,S_rel_per_hz` with strictly increasing frequency.
pub fn parse_spectrum(text: &str) -> Result<NoiseSpectrum> {
    let table = read_numeric(text, &[SPECTRUM_HEADER])?;
    for w in table.rows.windows(2) {
        if w[1].1[0] <= w[0].1[0] {
            return Err(Error::Parse { line: w[1].0, message: format!("frequency {} is not increasing", w[1].1[0]) });
        }
    }
    if let Some((line, _)) = table.rows.iter().find(|(_, r)| r[0] <= 0.0 || r[1] < 0.0) {
        return Err(Error::Parse { line: *line, message: "frequency must be positive and density non-negative".into() });
    }
    NoiseSpectrum::new(table.rows.into_iter().map(|(_, r)| (r[0], r[1])).collect())
}

/// `t_ms,sigma_um,amplitude`; converted to SI.
pub fn parse_expansion(text: &str) -> Result<ExpansionSeries> {
    let table = read_numeric(text, &[EXPANSION_HEADER])?;
    let mut records = Vec::with_capacity(table.rows.len());
    for (line, r) in table.rows {
        if r[0] < 0.0 || r[1] <= 0.0 {
            return Err(Error::Parse { line, message: "time must be non-negative and width positive".into() });
        }
        records.push(ExpansionRecord { t: r[0] * 1e-3, sigma: r[1] * 1e-6, amplitude: r[2] });
    }
    Ok(ExpansionSeries::from_records(records))
}

/// `param,value,uncertainty` rows.
pub fn parse_fit_parameters(text: &str) -> Result<Vec<(String, f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
    if !FIT_HEADER.iter().copied().eq(header.iter()) {
        return Err(Error::Parse { line: 1, message: format!("expected header `{}`", FIT_HEADER.join(",")) });
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize| {
            record[i].parse::<f64>().map_err(|_| Error::Parse { line, message: format!("`{}` is not a number", &record[i]) })
        };
        out.push((record[0].to_string(), num(1)?, num(2)?));
    }
    Ok(out)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `t_s,N` at nine significant digits.
pub fn population_csv(samples: &[(f64, f64)]) -> String {
    table(POPULATION_HEADER, samples.iter().map(|&(t, n)| vec![fmt_trajectory(t), fmt_trajectory(n)]))
}

/// `t_s,T_uK` at nine significant digits; temperatures given in kelvin.
pub fn temperature_csv(samples: &[(f64, f64)]) -> String {
    table(TEMPERATURE_HEADER, samples.iter().map(|&(t, k)| vec![fmt_trajectory(t), fmt_trajectory(k * 1e6)]))
}

/// Population data with per-point uncertainties when every point has one.
pub fn dataset_csv(data: &Dataset) -> String {
    let (header, scale) = match data.kind() {
        DatasetKind::Population => ((POPULATION_HEADER, POPULATION_SIGMA_HEADER), 1.0),
        DatasetKind::Temperature => ((TEMPERATURE_HEADER, TEMPERATURE_SIGMA_HEADER), 1e6),
    };
    let weighted = !data.is_empty() && data.points().iter().all(|p| p.sigma.is_some());
    let rows = data.points().iter().map(|p| {
        let mut row = vec![fmt_shortest(p.t), fmt_shortest(p.value * scale)];
        if weighted {
            row.push(fmt_shortest(p.sigma.unwrap_or(1.0) * scale));
        }
        row
    });
    table(if weighted { header.1 } else { header.0 }, rows)
}

pub fn spectrum_csv(spectrum: &NoiseSpectrum) -> String {
    table(SPECTRUM_HEADER, spectrum.samples().iter().map(|&(f, s)| vec![fmt_shortest(f), fmt_shortest(s)]))
}

pub fn expansion_csv(series: &ExpansionSeries) -> String {
    table(
        EXPANSION_HEADER,
        series.records.iter().map(|r| {
            vec![fmt_shortest(r.t * 1e3), fmt_shortest(r.sigma * 1e6), fmt_shortest(r.amplitude)]
        }),
    )
}

/// Lab-unit name and scale for a fitted parameter.
pub fn lab_unit_name(name: &str) -> (String, f64) {
    match name {
        "gamma" => ("gamma_per_s".into(), 1.0),
        "beta" => ("beta_cm3_per_s".into(), 1e6),
        "T0" => ("T0_uK".into(), 1e6),
        other => (other.to_string(), 1.0),
    }
}

/// `param,value,uncertainty` with lab-unit parameter names such as
/// `beta_cm3_per_s`.
pub fn fit_csv(result: &FitResult) -> String {
    table(
        FIT_HEADER,
        result.parameters.iter().map(|p| {
            let (name, scale) = lab_unit_name(p.name);
            vec![name, fmt_shortest(p.value * scale), fmt_shortest(p.uncertainty * scale)]
        }),
    )
}

pub fn residual_csv(report: &ResidualReport) -> String {
    table(
        RESIDUAL_HEADER,
        report.residuals.iter().map(|r| {
            vec![fmt_shortest(r.t), fmt_shortest(r.data), fmt_shortest(r.model), fmt_shortest(r.weighted)]
        }),
    )
}

/// Generic table writer for rows of numbers at shortest precision.
pub fn numeric_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_shortest(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_round_trip() {
        let samples = vec![(0.0, 4e6), (0.5, 3.123456789e6), (1.0, 1.0 / 3.0)];
        let text = population_csv(&samples);
        assert!(text.starts_with("t_s,N\n"));
        assert!(text.contains("3.12345679e6"));
        let d = parse_population(&text).unwrap();
        assert_eq!(d.len(), 3);
        assert!((d.points()[2].value - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn dataset_round_trip_is_exact() {
        let pts = vec![
            DataPoint { t: 0.1, value: 0.1 + 0.2, sigma: Some(1e-7) },
            DataPoint { t: 0.7, value: 123.456e-6, sigma: Some(3.3e-6) },
        ];
        let d = Dataset::new(pts, DatasetKind::Population).unwrap();
        assert_eq!(parse_population(&dataset_csv(&d)).unwrap(), d);
    }

    #[test]
    fn temperature_units() {
        let d = parse_temperature("t_s,T_uK\n0,123\n1,100\n").unwrap();
        assert!((d.points()[0].value - 123e-6).abs() < 1e-18);
        let back = parse_temperature(&temperature_csv(&[(0.0, 123e-6), (1.0, 1e-4)])).unwrap();
        assert!((back.points()[1].value - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn malformed_rows_report_line() {
        match parse_population("t_s,N\n0,1\n0.5,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_population("t_s,N\n# comment\n0,1\n0.5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_population("time,N\n0,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_population("t_s,N\n1,1\n0.5,1\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn spectrum_requires_increasing_frequency() {
        let s = parse_spectrum("freq_hz,S_rel_per_hz\n10,1e-12\n1000,2e-12\n").unwrap();
        assert_eq!(parse_spectrum(&spectrum_csv(&s)).unwrap(), s);
        assert!(matches!(
            parse_spectrum("freq_hz,S_rel_per_hz\n10,1\n10,1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn expansion_round_trip() {
        let recs = vec![ExpansionRecord { t: 1e-3, sigma: 50e-6, amplitude: 1e6 }];
        let s = ExpansionSeries::from_records(recs);
        let back = parse_expansion(&expansion_csv(&s)).unwrap();
        assert!((back.records[0].t - 1e-3).abs() < 1e-18);
        assert!((back.records[0].sigma - 50e-6).abs() < 1e-18);
    }

    #[test]
    fn fit_parameters_round_trip() {
        let text = "param,value,uncertainty\ngamma,0.6,0.01\nxi,2.8,0.1\n";
        let p = parse_fit_parameters(text).unwrap();
        assert_eq!(p[1], ("xi".to_string(), 2.8, 0.1));
        assert!(matches!(parse_fit_parameters("param,value,uncertainty\nx,y,1\n"), Err(Error::Parse { line: 2, .. })));
    }
}
