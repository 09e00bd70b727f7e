//! Append-only experiment records, one self-contained JSON object per line.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the record file when no flag is given.
pub const RECORD_FILE_ENV: &str = "SIDELOBE_RECORD_FILE";

/// Default record file, relative to the working directory.
pub const DEFAULT_RECORD_FILE: &str = "sidelobe-records.jsonl";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    /// RFC 3339 UTC instant, second precision.
    pub timestamp: String,
    /// The argument list as invoked.
    pub command: Vec<String>,
    pub inputs: serde_json::Value,
    pub outputs: serde_json::Value,
    pub elapsed_ms: u64,
    pub tool_version: String,
}

impl ExperimentRecord {
    pub fn new(
        command: Vec<String>,
        inputs: serde_json::Value,
        outputs: serde_json::Value,
        elapsed_ms: u64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            timestamp: utc_timestamp(SystemTime::now()),
            command,
            inputs,
            outputs,
            elapsed_ms,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Resolves the record path: explicit flag, then environment, then default.
pub fn resolve_record_path(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(RECORD_FILE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RECORD_FILE))
}

/// Appends one record as a single line.
pub fn append_record(path: &Path, record: &ExperimentRecord) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let line = serde_json::to_string(record).expect("record serialization cannot fail");
    writeln!(file, "{line}")
}

/// RFC 3339 UTC timestamp (e.g. `2026-02-01T09:30:00Z`) for a system time at
/// or after the epoch.
pub fn utc_timestamp(at: SystemTime) -> String {
    let secs = at
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = secs / 86_400;
    let rem = secs % 86_400;
    let (year, month, day) = civil_from_days(days as i64);
    format!(
        "{year:04}-{month:02}-{day:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}

/// Gregorian date from days since 1970-01-01 (Howard Hinnant's algorithm).
fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let year = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let month = (if mp < 10 { mp + 3 } else { mp - 9 }) as u32;
    (if month <= 2 { year + 1 } else { year }, month, day)
}
