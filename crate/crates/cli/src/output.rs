//! Artifact writing: atomic file output for traces, certificates, and
//! reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use convcert_core::model::ClosedLoopTrace;
use convcert_core::uncertainty::ParameterTrajectory;

use crate::{HarnessError, Result};

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io { path: path.display().to_string(), source }
}

/// Write bytes to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Serialize as pretty JSON with a trailing newline and write atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Write the trace CSV atomically.
pub fn write_trace_csv(path: &Path, trace: &ClosedLoopTrace) -> Result<()> {
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    write_atomic(path, &buf)
}

/// Write a parameter trajectory CSV atomically.
pub fn write_trajectory_csv(path: &Path, traj: &ParameterTrajectory) -> Result<()> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    write_atomic(path, &buf)
}
