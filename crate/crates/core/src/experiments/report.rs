use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::common::{num_serde, rows_serde};
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

/// Rectangular numeric table; non-finite cells serialize as `"inf"`, `"-inf"` or `"nan"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(with = "rows_serde")]
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Least-squares line `y = intercept + slope·x`, reported as `exponent = −slope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    #[serde(with = "num_serde")]
    pub exponent: f64,
    #[serde(with = "num_serde")]
    pub intercept: f64,
    /// RMS residual in `y`.
    #[serde(with = "num_serde")]
    pub residual: f64,
    pub points: usize,
}

impl Fit {
    pub fn linear(name: impl Into<String>, x: &[f64], y: &[f64]) -> Self {
        let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| (*a, *b)).collect();
        let m = pts.len() as f64;
        let (mut slope, mut intercept, mut residual) = (f64::NAN, f64::NAN, f64::NAN);
        if pts.len() >= 2 {
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            if sxx > 0.0 {
                slope = sxy / sxx;
                intercept = my - slope * mx;
                residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
            }
        }
        Self { name: name.into(), exponent: -slope, intercept, residual, points: pts.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(with = "num_serde")]
    pub value: f64,
    #[serde(with = "num_serde")]
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, value, threshold, detail: detail.into() }
    }
}

/// Wall-clock data; the only part of a report that varies between reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub timestamp_unix_s: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub id: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub tables: Vec<Table>,
    pub fits: Vec<Fit>,
    pub verdicts: Vec<Verdict>,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&Fit> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// JSON without the `timing` key; identical across reruns with the same seed.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self).map_err(|e| Error::Format(e.to_string()))?;
        if let Some(o) = v.as_object_mut() {
            o.remove("timing");
        }
        serde_json::to_string_pretty(&v).map_err(|e| Error::Format(e.to_string()))
    }

    /// Writes `<id>.json` and one `<id>_<table>.csv` per table into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut out = Vec::new();
        let json = dir.join(format!("{}.json", self.id));
        fs::write(&json, self.to_json()?).map_err(|e| Error::Io(format!("{}: {e}", json.display())))?;
        out.push(json);
        for t in &self.tables {
            let p = dir.join(format!("{}_{}.csv", self.id, t.name));
            fs::write(&p, t.to_csv()?).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            out.push(p);
        }
        Ok(out)
    }

    /// Plain-text summary.
    pub fn render(&self) -> String {
        let mut s = format!("experiment {} (schema {}, seed {})\n", self.id, self.schema, self.seed);
        for f in &self.fits {
            s += &format!("fit {}: exponent {:.4} (intercept {:.4}, rms residual {:.3e}, {} points)\n", f.name, f.exponent, f.intercept, f.residual, f.points);
        }
        for t in &self.tables {
            s += &format!("table {} ({} rows): {}\n", t.name, t.rows.len(), t.columns.join(", "));
        }
        for v in &self.verdicts {
            s += &format!("{} {}: value {:.6e}, threshold {:.6e}; {}\n", if v.pass { "PASS" } else { "FAIL" }, v.name, v.value, v.threshold, v.detail);
        }
        s += &format!("overall {}\n", if self.pass() { "PASS" } else { "FAIL" });
        s
    }
}

/// Collects report pieces and stamps timing on completion.
pub(crate) struct ReportBuilder {
    id: String,
    config: serde_json::Value,
    seed: u64,
    tables: Vec<Table>,
    fits: Vec<Fit>,
    verdicts: Vec<Verdict>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(id: &str, config: serde_json::Value, seed: u64) -> Self {
        Self { id: id.into(), config, seed, tables: Vec::new(), fits: Vec::new(), verdicts: Vec::new(), start: Instant::now() }
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn fit(&mut self, f: Fit) {
        self.fits.push(f);
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn finish(self) -> ExperimentReport {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        ExperimentReport {
            schema: REPORT_SCHEMA,
            id: self.id,
            config: self.config,
            seed: self.seed,
            tables: self.tables,
            fits: self.fits,
            verdicts: self.verdicts,
            timing: Timing { timestamp_unix_s: now, wall_time_s: self.start.elapsed().as_secs_f64() },
        }
    }
}
