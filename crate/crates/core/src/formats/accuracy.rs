use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{check_format_line, format_line, parse_f64, validation, write_atomic};
use crate::error::{Error, Result};
use crate::ranking::{AccuracyTable, ConfigAccuracy};

const KIND: &str = "dataproxy-accuracy";

/// One or more accuracy columns over a shared list of configurations.
///
/// ```text
/// #format     dataproxy-accuracy  1
/// config_id   <param>...  accuracy:<variant>...
/// ```
///
/// A lone column may also be named plain `accuracy`; its variant is then
/// the file stem. Param columns are taken from the first table.
pub fn render_accuracy_tables(tables: &[AccuracyTable]) -> Result<String> {
    let first = tables.first().ok_or_else(|| Error::ConfigMismatch("no accuracy tables to write".into()))?;
    let ids: Vec<&str> = first.config_ids().collect();
    for t in &tables[1..] {
        if t.config_ids().ne(ids.iter().copied()) {
            return Err(Error::ConfigMismatch(format!(
                "`{}` does not list the configs of `{}` in the same order",
                t.variant, first.variant
            )));
        }
    }
    let params: Vec<&String> = first
        .entries()
        .iter()
        .flat_map(|e| e.params.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = format_line(KIND);
    out.push_str("config_id");
    for p in &params {
        write!(out, "\t{p}").unwrap();
    }
    for t in tables {
        if t.variant.contains(['\t', '\n']) {
            return Err(Error::ConfigMismatch(format!(
                "variant name {:?} contains a tab or newline",
                t.variant
            )));
        }
        write!(out, "\taccuracy:{}", t.variant).unwrap();
    }
    out.push('\n');
    for (i, e) in first.entries().iter().enumerate() {
        out.push_str(&e.config_id);
        for p in &params {
            write!(out, "\t{}", e.params.get(*p).map_or("", String::as_str)).unwrap();
        }
        for t in tables {
            write!(out, "\t{}", t.entries()[i].accuracy).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_accuracy_tables(path: &Path, tables: &[AccuracyTable]) -> Result<()> {
    write_atomic(path, render_accuracy_tables(tables)?.as_bytes())
}

pub fn read_accuracy_tables(path: &Path) -> Result<Vec<AccuracyTable>> {
    let text = super::read_text(path)?;
    let mut lines = text.lines();
    check_format_line(path, lines.next(), KIND)?;
    let mut lines = lines.filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| validation(path, "header", "missing column header"))?
        .split('\t')
        .collect();
    if header.first() != Some(&"config_id") {
        return Err(validation(path, "header", "first column must be `config_id`"));
    }
    let stem = path.file_stem().map_or_else(|| "accuracy".into(), |s| s.to_string_lossy().into_owned());
    let mut params = Vec::new();
    let mut variants = Vec::new();
    for (c, name) in header.iter().enumerate().skip(1) {
        if *name == "accuracy" {
            variants.push((c, stem.clone()));
        } else if let Some(v) = name.strip_prefix("accuracy:") {
            variants.push((c, v.to_string()));
        } else {
            params.push((c, name.to_string()));
        }
    }
    if variants.is_empty() {
        return Err(validation(path, "header", "no `accuracy` column"));
    }
    if header.contains(&"accuracy") && variants.len() > 1 {
        return Err(validation(path, "header", "plain `accuracy` cannot be mixed with named columns"));
    }
    let mut entries: Vec<Vec<ConfigAccuracy>> = vec![Vec::new(); variants.len()];
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != header.len() {
            return Err(validation(
                path,
                format!("row {}", n + 1),
                format!("expected {} columns", header.len()),
            ));
        }
        if f[0].is_empty() {
            return Err(validation(path, "config_id", format!("row {} has an empty id", n + 1)));
        }
        let p: BTreeMap<String, String> =
            params.iter().map(|(c, name)| (name.clone(), f[*c].to_string())).collect();
        for (k, (c, v)) in variants.iter().enumerate() {
            entries[k].push(ConfigAccuracy {
                config_id: f[0].to_string(),
                params: p.clone(),
                accuracy: parse_f64(path, &format!("accuracy:{v}"), f[*c])?,
            });
        }
    }
    variants
        .into_iter()
        .zip(entries)
        .map(|((_, v), e)| {
            AccuracyTable::new(v, e).map_err(|err| validation(path, "config_id", err.to_string()))
        })
        .collect()
}
