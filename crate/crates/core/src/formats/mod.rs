//! On-disk artifacts. Every file starts with a format tag and a version;
//! readers refuse unknown versions and name the offending file and field.
//! Writers are atomic (temp file in the target directory, then rename).
//!
//! | artifact   | layout                                                   |
//! |------------|----------------------------------------------------------|
//! | manifest   | JSON lines: header object, then `{id, split, label}`     |
//! | outcomes   | tab-separated, `#probe` header lines, one 0/1 per probe  |
//! | features   | binary (`DPXFEAT1` magic) or tab-separated text          |
//! | selection  | `#` header lines with provenance, then one id per line   |
//! | importance | tab-separated `id, importance[, keep_prob]`              |
//! | accuracy   | tab-separated `config_id`, free params, `accuracy[:name]`|
//! | reports    | tab-separated ranking and experiment reports, markdown   |

mod accuracy;
mod features;
mod importance;
mod manifest;
mod outcomes;
mod report;
mod selection;

pub use accuracy::{read_accuracy_tables, render_accuracy_tables, write_accuracy_tables};
pub use features::{
    encode_features_binary, read_features, render_features_text, write_features_binary, write_features_text,
    FEATURES_MAGIC,
};
pub use importance::{read_importance, render_importance, write_importance};
pub use manifest::{read_manifest, render_manifest, write_manifest};
pub use outcomes::{read_outcomes, render_outcomes, write_outcomes};
pub use report::{
    render_experiment_accuracies, render_experiment_runs, render_experiment_summary, render_ranking_reports,
};
pub use selection::{read_selection, render_selection, write_selection};

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Version written into, and required from, every artifact.
pub const FORMAT_VERSION: u32 = 1;

/// Writes `contents` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| validation(path, "encoding", "file is not valid UTF-8"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&read_bytes(path)?))
}

pub(crate) fn validation(file: &Path, field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { file: file.to_path_buf(), field: field.into(), message: message.into() }
}

/// `#format<TAB>kind<TAB>version`
pub(crate) fn format_line(kind: &str) -> String {
    format!("#format\t{kind}\t{FORMAT_VERSION}\n")
}

pub(crate) fn check_format_line(path: &Path, line: Option<&str>, kind: &str) -> Result<()> {
    let fields: Vec<&str> = line.unwrap_or("").split('\t').collect();
    if fields.len() != 3 || fields[0] != "#format" {
        return Err(validation(path, "format", format!("first line must be `#format\\t{kind}\\t<version>`")));
    }
    if fields[1] != kind {
        return Err(validation(path, "format", format!("expected `{kind}`, found `{}`", fields[1])));
    }
    check_version(path, fields[2])
}

pub(crate) fn check_version(path: &Path, found: &str) -> Result<()> {
    if found.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(Error::VersionMismatch {
            file: path.to_path_buf(),
            expected: FORMAT_VERSION,
            found: found.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn parse_f64(path: &Path, field: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| validation(path, field, format!("`{raw}` is not a finite number")))
}
