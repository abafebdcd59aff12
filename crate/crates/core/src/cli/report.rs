//! Aggregation of run reports into one CSV table: one row per run, one
//! column per numeric `measured` field (nested keys joined with `.`).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use super::manifest::{RunManifest, RunReport, REPORT_FILE};
use super::ReportArgs;
use crate::error::{Error, Result};

/// Numeric leaves of `v`, keyed by their dotted path. Arrays and strings
/// are skipped; booleans become 0/1.
pub fn flatten_measured(v: &Value) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, prefix: String, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(child, key, out);
            }
        }
        Value::Number(n) => {
            out.insert(prefix, n.to_string());
        }
        Value::Bool(b) => {
            out.insert(prefix, u8::from(*b).to_string());
        }
        Value::Null | Value::String(_) | Value::Array(_) => {}
    }
}

pub fn read_report(dir: &Path) -> Result<RunReport> {
    let path = dir.join(REPORT_FILE);
    if !path.exists() {
        return Err(Error::MissingFile(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}

/// CSV with columns `run,command,status` followed by the sorted union of
/// metric names. Metrics a run lacks are left blank.
pub fn aggregate(runs: &[&Path]) -> Result<String> {
    let mut rows = Vec::with_capacity(runs.len());
    let mut columns = BTreeSet::new();
    for dir in runs {
        let manifest = RunManifest::read(dir)?;
        let status = serde_json::to_value(manifest.status).expect("status serializes");
        let metrics = match read_report(dir) {
            Ok(report) => flatten_measured(&report.measured),
            Err(Error::MissingFile(_)) if manifest.status == super::manifest::StepStatus::Failed => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        columns.extend(metrics.keys().cloned());
        rows.push((dir.display().to_string(), manifest.command, status, metrics));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["run".to_string(), "command".to_string(), "status".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (run, command, status, metrics) in rows {
        let mut rec = vec![run, command, status.as_str().unwrap_or_default().to_string()];
        rec.extend(columns.iter().map(|c| metrics.get(c).cloned().unwrap_or_default()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv writer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Internal(format!("csv writer: {e}"))
}

pub(super) fn run(a: &ReportArgs) -> Result<()> {
    let dirs: Vec<&Path> = a.runs.iter().map(|p| p.as_path()).collect();
    let table = aggregate(&dirs)?;
    match &a.out {
        Some(path) => fs::write(path, &table).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(table.as_bytes())
            .map_err(|e| Error::io(Path::new("<stdout>"), e)),
    }
}
