//! Run reports: a deterministic JSON envelope around each command's payload.
//!
//! Reports are byte-identical across runs given the same input digest, seed
//! and flags; wall time is only included when explicitly requested, since it
//! would break that guarantee (it is always logged to stderr).

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    /// The invoked command line, minus the binary name.
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// SHA-256 of the points file driving the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    pub payload: T,
}

/// Hex SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading {} for digest", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// The command line as invoked, without the binary path.
pub fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

/// Serializes the report and writes it (or prints to stdout when no path is
/// given). Trailing newline included so files are well-formed text.
pub fn emit<T: Serialize>(report: &RunReport<T>, path: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(report).context("serializing report")?;
    match path {
        Some(p) => std::fs::write(p, format!("{json}\n"))
            .with_context(|| format!("writing report to {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}
