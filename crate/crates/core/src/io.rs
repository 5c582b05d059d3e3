//! Configuration files, run records and data dumps.
//!
//! Configuration and run records are TOML; data is comma-separated text
//! whose first line is a `#` comment carrying the schema tag. Everything is
//! `f64` at this layer.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::WaveProfile;
use crate::spectral::{LineField, LineGrid, PeriodicField};

/// Schema tag written into every record and data file.
pub const SCHEMA: &str = "nanopteron/1";

/// Every key a configuration file may set. Unset keys fall back to the
/// command's defaults; command-line flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: Option<String>,
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
    pub eps: Option<f64>,
    pub sweep: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub half_length: Option<f64>,
    pub n: Option<usize>,
    pub auto_grid: Option<bool>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub modes: Option<usize>,
    pub anderson: Option<usize>,
    /// `new` or `original`.
    pub form: Option<String>,
    /// `quotient` or `band-zero`.
    pub inversion: Option<String>,
    /// `one-over-kappa` or `beta-over-kappa`.
    pub q_scaling: Option<String>,
    pub samples: Option<usize>,
    pub sites: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub snap_every: Option<usize>,
    /// `rk4` or `verlet`.
    pub integrator: Option<String>,
    pub threads: Option<usize>,
    pub out_dir: Option<String>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        if let Some(s) = &cfg.schema {
            if s != SCHEMA {
                return Err(Error::Parse(format!("unsupported schema {s:?}, expected {SCHEMA:?}")));
            }
        }
        Ok(cfg)
    }

    /// Keys set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay_fields!(base, top; schema, kappa, beta, eps, sweep, a, half_length, n, auto_grid, tol,
            max_iter, modes, anderson, form, inversion, q_scaling, samples, sites, dt, t_final,
            snap_every, integrator, threads, out_dir)
    }

    /// The set keys as a TOML table.
    pub fn to_table(&self) -> toml::Table {
        match toml::Value::try_from(self) {
            Ok(toml::Value::Table(t)) => t,
            _ => toml::Table::new(),
        }
    }
}

/// One pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Gate {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value <= bound, value, bound, note: String::new() }
    }

    /// Passes when `value ≥ bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value >= bound, value, bound, note: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// `PASS name value (bound)`.
    pub fn line(&self) -> String {
        format!(
            "{} {:<44} {:>12.4e}  (bound {:.3e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.bound,
            if self.note.is_empty() { String::new() } else { format!("  {}", self.note) }
        )
    }
}

/// Summary of one run. Wall-clock numbers live only under `timings`, so
/// the rest of the record is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub command: String,
    pub config: toml::Table,
    pub results: toml::Table,
    #[serde(default)]
    pub gates: Vec<Gate>,
    pub timings: toml::Table,
}

impl RunRecord {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            config: config.to_table(),
            results: toml::Table::new(),
            gates: vec![],
            timings: toml::Table::new(),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<toml::Value>) -> &mut Self {
        self.results.insert(key.into(), value.into());
        self
    }

    pub fn timing(&mut self, key: &str, seconds: f64) -> &mut Self {
        self.timings.insert(key.into(), seconds.into());
        self
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn all_passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let r: RunRecord = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", r.schema)));
        }
        Ok(r)
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Shortest round-trip text, in exponent form for very small or large
/// magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Write `# schema = …`, a header row, then the rows.
pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(w, "# schema = {SCHEMA}").map_err(csv_err)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Incompatible(format!("row of {} values under {} columns", row.len(), header.len())));
        }
        out.write_record(row.iter().map(|&v| format_f64(v))).map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

/// Read a file written by [`write_csv`].
pub fn read_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = vec![];
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// On-disk form of a [`WaveProfile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub schema: String,
    pub eps: f64,
    pub speed: f64,
    pub core_width: f64,
    pub half_length: f64,
    pub odd: Vec<f64>,
    pub even: Vec<f64>,
    pub ripple_omega: Option<f64>,
    #[serde(default)]
    pub ripple_odd: Vec<f64>,
    #[serde(default)]
    pub ripple_even: Vec<f64>,
}

impl ProfileFile {
    pub fn from_profile(p: &WaveProfile<f64>) -> Self {
        let (omega, ro, re) = match &p.ripple {
            Some((r, w)) => (Some(*w), r[0].coeffs().to_vec(), r[1].coeffs().to_vec()),
            None => (None, vec![], vec![]),
        };
        Self {
            schema: SCHEMA.into(),
            eps: p.eps,
            speed: p.speed,
            core_width: p.core_width,
            half_length: p.line[0].grid().half_length(),
            odd: p.line[0].values().to_vec(),
            even: p.line[1].values().to_vec(),
            ripple_omega: omega,
            ripple_odd: ro,
            ripple_even: re,
        }
    }

    pub fn to_profile(&self) -> Result<WaveProfile<f64>> {
        if self.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", self.schema)));
        }
        if self.odd.len() != self.even.len() {
            return Err(Error::Parse("profile components differ in length".into()));
        }
        let grid: Arc<LineGrid<f64>> = LineGrid::new(self.half_length, self.odd.len())?;
        let ripple = match self.ripple_omega {
            Some(w) => {
                if self.ripple_odd.len() != self.ripple_even.len() {
                    return Err(Error::Parse("ripple components differ in length".into()));
                }
                Some((
                    [PeriodicField::new(self.ripple_odd.clone()), PeriodicField::new(self.ripple_even.clone())],
                    w,
                ))
            }
            None => None,
        };
        Ok(WaveProfile {
            eps: self.eps,
            speed: self.speed,
            line: [LineField::new(grid.clone(), self.odd.clone())?, LineField::new(grid, self.even.clone())?],
            ripple,
            core_width: self.core_width,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DimerParams;

    #[test]
    fn config_parse_and_overlay() {
        let file = RunConfig::parse("schema = \"nanopteron/1\"\nkappa = 3.0\neps = 0.1\nform = \"original\"\n").unwrap();
        let flags = RunConfig { eps: Some(0.2), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.kappa, Some(3.0));
        assert_eq!(merged.eps, Some(0.2));
        assert_eq!(merged.form.as_deref(), Some("original"));
        assert!(matches!(RunConfig::parse("kapa = 2.0"), Err(Error::Parse(_))));
        assert!(matches!(RunConfig::parse("schema = \"other/9\""), Err(Error::Parse(_))));
    }

    #[test]
    fn record_round_trip() {
        let cfg = RunConfig { kappa: Some(2.0), ..Default::default() };
        let mut r = RunRecord::new("periodic", &cfg);
        r.result("omega", 17.5).result("converged", true).timing("solve", 0.25);
        r.gate(Gate::at_most("residual", 1e-13, 1e-10));
        let text = r.to_toml().unwrap();
        assert!(text.contains("schema = \"nanopteron/1\""));
        let back = RunRecord::from_toml(&text).unwrap();
        assert_eq!(back, r);
        assert!(back.all_passed());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![vec![0.1, 1.0 / 3.0, -2e-300], vec![1.0, f64::MIN_POSITIVE, 7.0], vec![1.5e20, -0.0, 3e-5]];
        let mut buf = vec![];
        write_csv(&mut buf, &["a", "b", "c"], rows.clone()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema = nanopteron/1\na,b,c\n"));
        let (h, back) = read_csv(&buf[..]).unwrap();
        assert_eq!(h, vec!["a", "b", "c"]);
        assert_eq!(back, rows);
        assert!(text.contains("-2e-300"));
        assert!(write_csv(&mut vec![], &["a"], vec![vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn profile_file_round_trip() {
        let p = DimerParams::quadratic(2.0, 1.0).unwrap();
        let g = LineGrid::new(40.0, 256).unwrap();
        let mut prof = WaveProfile::leading(&p, 0.2, &g);
        prof.ripple = Some(([PeriodicField::new(vec![0.0, 1e-5]), PeriodicField::new(vec![0.0, -3e-6])], 8.6));
        let text = ProfileFile::from_profile(&prof).to_toml().unwrap();
        let back = ProfileFile::from_toml(&text).unwrap().to_profile().unwrap();
        assert_eq!(back.line[0].values(), prof.line[0].values());
        assert_eq!(back.sample(64, 3.5, false), prof.sample(64, 3.5, false));
    }
}
