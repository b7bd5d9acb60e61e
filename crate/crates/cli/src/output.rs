use std::io::Write;

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

/// Writes `bytes` to the configured path, or stdout.
pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> std::io::Result<()> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

pub fn json<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Builds a CSV document from a header and rows of preformatted cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Shortest round-trip form, switching to exponent notation for very
/// small or large magnitudes.
pub fn real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// [`real`], empty for missing values.
pub fn num(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// The config echoed into reports: the output destination is left out so
/// the same run written to two places produces the same bytes.
pub fn echo_config(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.output.path = None;
    c
}
