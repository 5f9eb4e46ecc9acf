//! Labelled, unit-carrying reports with a CSV twin.

use std::fmt::Write as _;

use super::tables::fmt_shortest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Configured,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::Configured => "configured",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantityValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: String,
    pub value: QuantityValue,
    /// `"1"` for dimensionless numbers, `"-"` for text.
    pub unit: &'static str,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub quantities: Vec<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

/// Six significant digits, scientific outside [1e-4, 1e7).
pub fn fmt_display(v: f64) -> String {
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    if rounded == 0.0 || (1e-4..1e7).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Section {
        self.sections.push(Section { name: name.to_string(), quantities: Vec::new() });
        self.sections.last_mut().expect("just pushed")
    }

    pub fn find(&self, name: &str) -> Option<&Quantity> {
        self.sections.iter().flat_map(|s| &s.quantities).find(|q| q.name == name)
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        match self.find(name)?.value {
            QuantityValue::Number(v) => Some(v),
            QuantityValue::Text(_) => None,
        }
    }

    /// `name = value  [unit, provenance]` lines grouped under `[section]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", s.name);
            for q in &s.quantities {
                let v = match &q.value {
                    QuantityValue::Number(x) => fmt_display(*x),
                    QuantityValue::Text(t) => t.clone(),
                };
                let _ = writeln!(out, "{} = {}  [{}, {}]", q.name, v, q.unit, q.provenance.as_str());
            }
        }
        out
    }

    /// `section,name,value,unit,provenance` with full-precision values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,name,value,unit,provenance\n");
        for s in &self.sections {
            for q in &s.quantities {
                let v = match &q.value {
                    QuantityValue::Number(x) => fmt_shortest(*x),
                    QuantityValue::Text(t) => t.replace(',', ";"),
                };
                let _ = writeln!(out, "{},{},{},{},{}", s.name, q.name, v, q.unit, q.provenance.as_str());
            }
        }
        out
    }
}

impl Section {
    pub fn computed(&mut self, name: &str, value: f64, unit: &'static str) -> &mut Self {
        self.number(name, value, unit, Provenance::Computed)
    }

    pub fn configured(&mut self, name: &str, value: f64, unit: &'static str) -> &mut Self {
        self.number(name, value, unit, Provenance::Configured)
    }

    pub fn number(&mut self, name: &str, value: f64, unit: &'static str, provenance: Provenance) -> &mut Self {
        self.push(name, QuantityValue::Number(value), unit, provenance)
    }

    pub fn text(&mut self, name: &str, value: impl Into<String>, provenance: Provenance) -> &mut Self {
        self.push(name, QuantityValue::Text(value.into()), "-", provenance)
    }

    fn push(&mut self, name: &str, value: QuantityValue, unit: &'static str, provenance: Provenance) -> &mut Self {
        self.quantities.push(Quantity { name: name.to_string(), value, unit, provenance });
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_formatting() {
        assert_eq!(fmt_display(79.71423), "79.7142");
        assert_eq!(fmt_display(3.0906e9), "3.0906e9");
        assert_eq!(fmt_display(0.0), "0");
        assert_eq!(fmt_display(1.2203e-17), "1.2203e-17");
    }

    #[test]
    fn text_and_csv_twins() {
        let mut r = Report::new();
        r.section("ramp").computed("adiabatic_reference_uK", 79.714, "uK").configured("duration_s", 0.07, "s");
        r.section("note").text("model", "gated", Provenance::Configured);
        let text = r.to_text();
        assert!(text.contains("adiabatic_reference_uK = 79.714  [uK, computed]"));
        let csv = r.to_csv();
        assert!(csv.contains("ramp,duration_s,0.07,s,configured\n"));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(r.number("duration_s"), Some(0.07));
    }
}
