use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{check_format_line, format_line, parse_f64, validation, write_atomic};
use crate::error::{Error, Result};
use crate::importance::ProbeOutcomeSet;
use crate::sample::{DatasetManifest, SampleId};

const KIND: &str = "dataproxy-outcomes";

/// ```text
/// #format   dataproxy-outcomes  1
/// #probe    <id>  lower|upper|other  <accuracy>
/// id        <probe id>...
/// <test id> 0|1...
/// ```
pub fn render_outcomes(outcomes: &ProbeOutcomeSet) -> String {
    let mut out = format_line(KIND);
    for (p, id) in outcomes.probe_ids().iter().enumerate() {
        let role = if p == outcomes.lower_index() {
            "lower"
        } else if p == outcomes.upper_index() {
            "upper"
        } else {
            "other"
        };
        writeln!(out, "#probe\t{id}\t{role}\t{}", outcomes.accuracy_of(p)).unwrap();
    }
    out.push_str("id");
    for id in outcomes.probe_ids() {
        write!(out, "\t{id}").unwrap();
    }
    out.push('\n');
    for (i, id) in outcomes.test_ids().iter().enumerate() {
        out.push_str(id.as_str());
        for p in 0..outcomes.probe_ids().len() {
            out.push_str(if outcomes.flags(p)[i] { "\t1" } else { "\t0" });
        }
        out.push('\n');
    }
    out
}

pub fn write_outcomes(path: &Path, outcomes: &ProbeOutcomeSet) -> Result<()> {
    write_atomic(path, render_outcomes(outcomes).as_bytes())
}

/// Reads an outcomes file and aligns it with the manifest's test split.
/// Every manifest test id must have a record; records for unknown ids
/// are rejected.
pub fn read_outcomes(path: &Path, manifest: &DatasetManifest) -> Result<ProbeOutcomeSet> {
    let text = super::read_text(path)?;
    let mut lines = text.lines();
    check_format_line(path, lines.next(), KIND)?;

    let mut probes = Vec::new();
    let mut column_header = None;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("#probe\t") {
            let f: Vec<&str> = rest.split('\t').collect();
            if f.len() != 3 {
                return Err(validation(path, "#probe", format!("expected id, role, accuracy in `{line}`")));
            }
            if !matches!(f[1], "lower" | "upper" | "other") {
                return Err(validation(path, "role", format!("unknown role `{}`", f[1])));
            }
            probes.push((f[0].to_string(), f[1].to_string(), parse_f64(path, "accuracy", f[2])?));
        } else if line.starts_with('#') {
            continue;
        } else {
            column_header = Some(line);
            break;
        }
    }
    let role = |r: &str| {
        let mut it = probes.iter().filter(|p| p.1 == r);
        match (it.next(), it.next()) {
            (Some(p), None) => Ok(p.0.clone()),
            _ => Err(validation(path, "role", format!("exactly one `{r}` probe is required"))),
        }
    };
    let (lower, upper) = (role("lower")?, role("upper")?);

    let columns: Vec<&str> = column_header
        .ok_or_else(|| validation(path, "header", "missing column header"))?
        .split('\t')
        .collect();
    let expected: Vec<&str> = std::iter::once("id").chain(probes.iter().map(|p| p.0.as_str())).collect();
    if columns != expected {
        return Err(validation(path, "header", format!("columns must be {expected:?}, found {columns:?}")));
    }

    let mut rows: HashMap<SampleId, Vec<bool>> = HashMap::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let field = format!("record {}", n + 1);
        if f.len() != columns.len() {
            return Err(validation(path, field, format!("expected {} columns", columns.len())));
        }
        let id = SampleId::new(f[0]).map_err(|e| validation(path, &field, e.to_string()))?;
        let flags = f[1..]
            .iter()
            .map(|v| match *v {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(validation(path, &field, format!("flag `{other}` is not 0 or 1"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if rows.insert(id.clone(), flags).is_some() {
            return Err(validation(path, "id", format!("duplicate record for `{id}`")));
        }
    }

    let mut correct = vec![Vec::with_capacity(manifest.test_ids().len()); probes.len()];
    for id in manifest.test_ids() {
        let flags = rows
            .remove(id)
            .ok_or_else(|| Error::MissingOutcome { file: path.to_path_buf(), id: id.to_string() })?;
        for (p, f) in flags.into_iter().enumerate() {
            correct[p].push(f);
        }
    }
    if let Some(extra) = rows.keys().min() {
        return Err(validation(path, "id", format!("`{extra}` is not a test sample of the manifest")));
    }
    ProbeOutcomeSet::new(
        probes.iter().map(|p| p.0.clone()).collect(),
        &lower,
        &upper,
        probes.iter().map(|p| p.2).collect(),
        manifest.test_ids().to_vec(),
        correct,
    )
    .map_err(|e| validation(path, "accuracy", e.to_string()))
}
