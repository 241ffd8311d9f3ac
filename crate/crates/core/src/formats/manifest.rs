use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, validation, write_atomic, FORMAT_VERSION};
use crate::error::Result;
use crate::sample::{DatasetManifest, SampleId, Split};

const KIND: &str = "dataproxy-manifest";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: serde_json::Value,
    num_labels: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: SampleId,
    split: Split,
    label: u32,
}

pub fn render_manifest(manifest: &DatasetManifest) -> String {
    let mut out = String::new();
    let header =
        Header { format: KIND.into(), version: FORMAT_VERSION.into(), num_labels: manifest.num_labels() };
    writeln!(out, "{}", serde_json::to_string(&header).expect("header serializes")).unwrap();
    for split in [Split::Train, Split::Test] {
        let labels = match split {
            Split::Train => manifest.train_labels(),
            Split::Test => manifest.test_labels(),
        };
        for (id, &label) in manifest.ids(split).iter().zip(labels) {
            let rec = Record { id: id.clone(), split, label };
            writeln!(out, "{}", serde_json::to_string(&rec).expect("record serializes")).unwrap();
        }
    }
    out
}

pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    write_atomic(path, render_manifest(manifest).as_bytes())
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = super::read_text(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Header = match lines.next() {
        Some((_, l)) => {
            serde_json::from_str(l).map_err(|e| validation(path, "header", format!("line 1: {e}")))?
        }
        None => return Err(validation(path, "header", "file is empty")),
    };
    if header.format != KIND {
        return Err(validation(path, "format", format!("expected `{KIND}`, found `{}`", header.format)));
    }
    let version = match &header.version {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    check_version(path, &version)?;
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, line) in lines {
        let rec: Record = serde_json::from_str(line)
            .map_err(|e| validation(path, "record", format!("line {}: {e}", i + 1)))?;
        match rec.split {
            Split::Train => train.push((rec.id, rec.label)),
            Split::Test => test.push((rec.id, rec.label)),
        }
    }
    DatasetManifest::new(train, test, header.num_labels)
        .map_err(|e| validation(path, "records", e.to_string()))
}
