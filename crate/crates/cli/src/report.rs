//! The machine-readable analysis report (JSON, frozen schema version) and
//! the atomic file-writing helpers every command goes through.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use multifract::{SpectrumCurve, TickLag};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Frozen report schema version; bump on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "multifract".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputInfo {
    pub source: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tick_lag: Option<TickLag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped_rows: Option<usize>,
}

/// One analysis run: input identity, the exact flag values echoed back, the
/// result curves with their fit diagnostics, and every warning raised.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub input: InputInfo,
    /// Flags echoed verbatim for reproducibility (ordered map so the JSON
    /// serialization is deterministic).
    pub config: BTreeMap<String, String>,
    pub curves: Vec<SpectrumCurve>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn new(command: &str, input: InputInfo, config: BTreeMap<String, String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::default(),
            command: command.to_string(),
            input,
            config,
            curves: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let report: AnalysisReport = serde_json::from_str(&text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(CliError::Data(format!(
                "{}: unsupported schema version {} (expected {SCHEMA_VERSION})",
                path.display(),
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// First curve of the given kind, if present.
    pub fn curve(&self, kind: multifract::SpectrumKind) -> Option<&SpectrumCurve> {
        self.curves.iter().find(|c| c.kind == kind)
    }
}

/// Exact per-level cascade box masses, written next to generated cascade
/// series as `<out>.measure.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub model: String,
    pub a: f64,
    pub depth: u32,
    pub seed: u64,
    pub levels: Vec<MeasureLevel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureLevel {
    pub level: u32,
    pub weights: Vec<f64>,
}

/// Writes via a temporary file in the destination directory plus a rename,
/// so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        CliError::Data(format!("cannot create temp file in {}: {e}", dir.display()))
    })?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}
