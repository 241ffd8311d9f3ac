use std::fmt::Write as _;
use std::path::Path;

use super::{check_format_line, format_line, parse_f64, validation, write_atomic};
use crate::error::Result;
use crate::importance::ImportanceTable;
use crate::sample::{SampleId, Split};

const KIND: &str = "dataproxy-importance";

pub fn render_importance(table: &ImportanceTable) -> String {
    let mut out = format_line(KIND);
    let split = match table.split() {
        Split::Train => "train",
        Split::Test => "test",
    };
    writeln!(out, "#split\t{split}").unwrap();
    let keep = table.keep_prob();
    out.push_str(if keep.is_some() { "id\timportance\tkeep_prob\n" } else { "id\timportance\n" });
    for (i, id) in table.ids().iter().enumerate() {
        write!(out, "{id}\t{}", table.values()[i]).unwrap();
        if let Some(k) = keep {
            write!(out, "\t{}", k[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_importance(path: &Path, table: &ImportanceTable) -> Result<()> {
    write_atomic(path, render_importance(table).as_bytes())
}

/// Reads the table; a `keep_prob` column, if present, is recomputed from the
/// values and checked against the stored one.
pub fn read_importance(path: &Path) -> Result<ImportanceTable> {
    let text = super::read_text(path)?;
    let mut lines = text.lines();
    check_format_line(path, lines.next(), KIND)?;
    let split = match lines.next() {
        Some("#split\ttrain") => Split::Train,
        Some("#split\ttest") => Split::Test,
        _ => return Err(validation(path, "#split", "expected `#split\\ttrain` or `#split\\ttest`")),
    };
    let has_keep = match lines.next() {
        Some("id\timportance") => false,
        Some("id\timportance\tkeep_prob") => true,
        _ => return Err(validation(path, "header", "expected `id\\timportance[\\tkeep_prob]`")),
    };
    let (mut ids, mut values, mut keep) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let field = format!("row {}", n + 1);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 2 + usize::from(has_keep) {
            return Err(validation(path, field, "wrong number of columns"));
        }
        ids.push(SampleId::new(f[0]).map_err(|e| validation(path, &field, e.to_string()))?);
        values.push(parse_f64(path, "importance", f[1])?);
        if has_keep {
            keep.push(parse_f64(path, "keep_prob", f[2])?);
        }
    }
    let table = ImportanceTable::new(split, ids, values)
        .map_err(|e| validation(path, "importance", e.to_string()))?;
    if !has_keep {
        return Ok(table);
    }
    let table = crate::importance::normalize_keep_prob(table)
        .map_err(|e| validation(path, "keep_prob", e.to_string()))?;
    let recomputed = table.keep_prob().unwrap_or_default();
    if let Some(i) = (0..keep.len()).find(|&i| (recomputed[i] - keep[i]).abs() > 1e-12) {
        return Err(validation(
            path,
            "keep_prob",
            format!("row {} stores {} but the importance column implies {}", i + 1, keep[i], recomputed[i]),
        ));
    }
    Ok(table)
}
