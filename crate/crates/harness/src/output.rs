//! CSV rows emitted by the harness. Headers are fixed per file.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::Result;

/// `method,k,influence,runtime_ms`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: String,
    pub k: usize,
    pub influence: f64,
    pub runtime_ms: Option<f64>,
}

/// `method_a,method_b,k,intersection`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionRow {
    pub method_a: String,
    pub method_b: String,
    pub k: usize,
    pub intersection: usize,
}

/// `index,user,gain_estimate,marginal,spillover,cumulative`
///
/// `marginal` is the target's growth when its `index`-th seed is committed;
/// `spillover` is the growth caused by other products' commits until the
/// target's next seed; `cumulative` is the count after both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerSeedRow {
    pub index: usize,
    pub user: usize,
    pub gain_estimate: f64,
    pub marginal: f64,
    pub spillover: f64,
    pub cumulative: f64,
}

/// `check,status,detail`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub check: String,
    pub status: String,
    pub detail: String,
}

/// Rows with a fixed header, written even when there are no rows.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

impl CsvRow for SweepRow {
    const HEADER: &'static [&'static str] = &["method", "k", "influence", "runtime_ms"];
}

impl CsvRow for IntersectionRow {
    const HEADER: &'static [&'static str] = &["method_a", "method_b", "k", "intersection"];
}

impl CsvRow for PerSeedRow {
    const HEADER: &'static [&'static str] = &["index", "user", "gain_estimate", "marginal", "spillover", "cumulative"];
}

impl CsvRow for VerifyRow {
    const HEADER: &'static [&'static str] = &["check", "status", "detail"];
}

pub fn to_csv<T: CsvRow>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn write_csv<T: CsvRow>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_csv(rows)?)?;
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}
