use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{check_format_line, format_line, validation, write_atomic};
use crate::error::Result;
use crate::resample::{Provenance, ProxySelection};
use crate::sample::SampleId;

const KIND: &str = "dataproxy-selection";

/// ```text
/// #format       dataproxy-selection  1
/// #provenance   {json}
/// #kept_labels  0,3,7
/// <id>          one per line, manifest order
/// ```
pub fn render_selection(selection: &ProxySelection) -> String {
    let mut out = format_line(KIND);
    let prov = serde_json::to_string(&selection.provenance).expect("provenance serializes");
    writeln!(out, "#provenance\t{prov}").unwrap();
    let labels: Vec<String> = selection.kept_labels.iter().map(u32::to_string).collect();
    writeln!(out, "#kept_labels\t{}", labels.join(",")).unwrap();
    for id in &selection.kept_train_ids {
        writeln!(out, "{id}").unwrap();
    }
    out
}

pub fn write_selection(path: &Path, selection: &ProxySelection) -> Result<()> {
    write_atomic(path, render_selection(selection).as_bytes())
}

pub fn read_selection(path: &Path) -> Result<ProxySelection> {
    let text = super::read_text(path)?;
    let mut lines = text.lines();
    check_format_line(path, lines.next(), KIND)?;
    let provenance: Provenance = match lines.next().and_then(|l| l.strip_prefix("#provenance\t")) {
        Some(json) => {
            serde_json::from_str(json).map_err(|e| validation(path, "#provenance", e.to_string()))?
        }
        None => return Err(validation(path, "#provenance", "missing provenance line")),
    };
    let kept_labels: BTreeSet<u32> = match lines.next().and_then(|l| l.strip_prefix("#kept_labels\t")) {
        Some("") => BTreeSet::new(),
        Some(list) => list
            .split(',')
            .map(|v| v.parse().map_err(|_| validation(path, "#kept_labels", format!("`{v}` is not a label"))))
            .collect::<Result<_>>()?,
        None => return Err(validation(path, "#kept_labels", "missing kept-labels line")),
    };
    let kept_train_ids = lines
        .filter(|l| !l.is_empty())
        .map(|l| SampleId::new(l).map_err(|e| validation(path, "id", e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProxySelection { kept_train_ids, kept_labels, provenance })
}
