use std::fmt::Write as _;
use std::path::Path;

use super::{check_format_line, format_line, parse_f64, validation, write_atomic, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::sample::SampleId;

/// First eight bytes of a binary feature file.
pub const FEATURES_MAGIC: &[u8; 8] = b"DPXFEAT1";
const KIND: &str = "dataproxy-features";

/// Binary layout, all integers little-endian:
///
/// ```text
/// magic[8] version:u32 rows:u64 dim:u32
/// rows × (len:u32 utf8-id[len])
/// rows × dim × f32
/// ```
///
/// Values are stored as `f32`; anything not exactly representable is
/// rounded.
pub fn encode_features_binary(features: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + features.data().len() * 4);
    out.extend_from_slice(FEATURES_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(features.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(features.dim() as u32).to_le_bytes());
    for id in features.sample_ids() {
        out.extend_from_slice(&(id.as_str().len() as u32).to_le_bytes());
        out.extend_from_slice(id.as_str().as_bytes());
    }
    for v in features.data() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn write_features_binary(path: &Path, features: &FeatureMatrix) -> Result<()> {
    write_atomic(path, &encode_features_binary(features))
}

/// Text alternative for small fixtures: a format line, `id f0 f1 …`
/// header, then one tab-separated row per sample. Values round-trip
/// exactly.
pub fn render_features_text(features: &FeatureMatrix) -> String {
    let mut out = format_line(KIND);
    out.push_str("id");
    for k in 0..features.dim() {
        write!(out, "\tf{k}").unwrap();
    }
    out.push('\n');
    for (id, row) in features.sample_ids().iter().zip(features.iter_rows()) {
        out.push_str(id.as_str());
        for v in row {
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_features_text(path: &Path, features: &FeatureMatrix) -> Result<()> {
    write_atomic(path, render_features_text(features).as_bytes())
}

/// Reads either layout, chosen by the leading magic bytes.
pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = super::read_bytes(path)?;
    if bytes.starts_with(FEATURES_MAGIC) {
        decode_binary(path, &bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| validation(path, "magic", "neither a binary nor a text feature file"))?;
        decode_text(path, &text)
    }
}

struct Cursor<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, field: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| validation(self.path, field, "file is truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, field: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, field)?.try_into().unwrap()))
    }

    fn u64(&mut self, field: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }
}

fn decode_binary(path: &Path, bytes: &[u8]) -> Result<FeatureMatrix> {
    let mut c = Cursor { path, bytes, pos: FEATURES_MAGIC.len() };
    let version = c.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            file: path.to_path_buf(),
            expected: FORMAT_VERSION,
            found: version.to_string(),
        });
    }
    let rows = usize::try_from(c.u64("rows")?).map_err(|_| validation(path, "rows", "too large"))?;
    let dim = c.u32("dim")? as usize;
    let payload = rows.checked_mul(dim).and_then(|v| v.checked_mul(4));
    if payload.is_none_or(|p| p > bytes.len()) {
        return Err(validation(path, "rows", format!("{rows} × {dim} values exceed the file size")));
    }
    let mut ids = Vec::with_capacity(rows);
    for i in 0..rows {
        let len = c.u32("ids")? as usize;
        let raw = c.take(len, "ids")?;
        let s =
            std::str::from_utf8(raw).map_err(|_| validation(path, "ids", format!("id {i} is not UTF-8")))?;
        ids.push(SampleId::new(s).map_err(|e| validation(path, "ids", e.to_string()))?);
    }
    let data: Vec<f64> = c
        .take(rows * dim * 4, "values")?
        .chunks_exact(4)
        .map(|b| f64::from(f32::from_le_bytes(b.try_into().unwrap())))
        .collect();
    if c.pos != bytes.len() {
        return Err(validation(path, "values", "trailing bytes after the last row"));
    }
    FeatureMatrix::new(ids, dim, data).map_err(|e| validation(path, "values", e.to_string()))
}

fn decode_text(path: &Path, text: &str) -> Result<FeatureMatrix> {
    let mut lines = text.lines();
    check_format_line(path, lines.next(), KIND)?;
    let header = lines.next().ok_or_else(|| validation(path, "header", "missing column header"))?;
    let dim = header.split('\t').count().saturating_sub(1);
    if !header.starts_with("id\t") || dim == 0 {
        return Err(validation(path, "header", "expected `id` followed by feature columns"));
    }
    let (mut ids, mut data) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let field = format!("row {}", n + 1);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != dim + 1 {
            return Err(validation(path, field, format!("expected {} columns", dim + 1)));
        }
        ids.push(SampleId::new(f[0]).map_err(|e| validation(path, &field, e.to_string()))?);
        for v in &f[1..] {
            data.push(parse_f64(path, &field, v)?);
        }
    }
    FeatureMatrix::new(ids, dim, data).map_err(|e| validation(path, "values", e.to_string()))
}
