use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub units: String,
    /// Every setting the run read, after layering and defaults.
    pub config: serde_json::Value,
    /// Resolved modelling choices, e.g. which kernel was used.
    pub flags: BTreeMap<String, serde_json::Value>,
}

/// Rectangular table of real values plus metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn new(columns: Vec<String>, metadata: Metadata) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn flag(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("flag values serialize");
        self.metadata.flags.insert(key.to_string(), value);
    }

    fn check(&self) -> CliResult<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CliError::Output(format!("row {i} has {} values for {} columns", row.len(), self.columns.len())));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(CliError::Output(format!("row {i} contains non-finite value {v}")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        self.check()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_json(&self) -> CliResult<Vec<u8>> {
        self.check()?;
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(table: &ResultTable, format: Format, path: Option<&std::path::Path>) -> CliResult<()> {
    let bytes = table.render(format)?;
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(&bytes).and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| CliError::Io {
                    path: "<stdout>".to_string(),
                    source,
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            tool: "zenotraj".into(),
            version: "0".into(),
            scenario: "filter".into(),
            units: "ωq = 1".into(),
            config: serde_json::json!({"t": 5.0}),
            flags: BTreeMap::new(),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(vec!["t".into(), "D_N1_n0".into()], meta());
        assert_eq!(t.to_csv().unwrap(), b"t,D_N1_n0\n");
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let mut t = ResultTable::new(vec!["x".into()], meta());
        t.push(vec![0.1]);
        t.push(vec![-2.5e-300]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], "1.0000000000000001e-1");
        assert_eq!(lines[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(lines[2].parse::<f64>().unwrap(), -2.5e-300);
    }

    #[test]
    fn json_round_trips_bits() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()], meta());
        t.push(vec![std::f64::consts::PI, 1.0 / 3.0]);
        t.push(vec![5e-324, -0.0]);
        t.flag("omega_q_t", 5.0);
        let back: ResultTable = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.metadata, t.metadata);
        for (r, s) in back.rows.iter().zip(&t.rows) {
            for (x, y) in r.iter().zip(s) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut t = ResultTable::new(vec!["x".into()], meta());
        t.push(vec![f64::NAN]);
        assert!(t.to_csv().is_err());
        assert!(t.to_json().is_err());
    }
}
