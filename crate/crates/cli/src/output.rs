use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::Failure;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::numeric(format!("cannot write {}: {e}", path.display()))
}

/// Writes bytes to `path`, or to standard output when no path is given.
pub fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_failure(p, e)),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::numeric(format!("stdout: {e}"))),
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Embedded<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

/// Compact JSON object holding the effective config next to the fields of `body`.
pub fn json_with_config(cfg: &RunConfig, body: &impl Serialize) -> String {
    let mut s = serde_json::to_string(&Embedded { config: cfg, body }).expect("artifact serializes");
    s.push('\n');
    s
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

/// Non-JSON artifacts carry their effective config in `<path>.config.json`.
pub fn write_config_sidecar(cfg: &RunConfig, path: Option<&Path>) -> Result<(), Failure> {
    if let Some(p) = path {
        let side = sidecar_path(p);
        std::fs::write(&side, to_json(cfg)).map_err(|e| io_failure(&side, e))?;
    }
    Ok(())
}

pub fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::numeric(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::numeric(format!("csv: {e}")))
}

/// Grid metadata of a sampled symbol lives in `<path>.json`.
pub fn sidecar_json_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
