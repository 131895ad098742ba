//! Text model format.
//!
//! ```text
//! normconflict-linear-svm 1
//! shape <K> <d>
//! mode <concat|offset>
//! classes <label> ... <label>
//! bias <b_1> ... <b_K>
//! w <w_1,1> ... <w_1,d>
//! ...                         (K weight lines)
//! ```
//!
//! Floats are written in shortest round-trip decimal form, so a saved
//! model reloads bit for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use super::{ClassifierError, LinearModel, Result};
use crate::corpus::ConflictLabel;
use crate::embedding::FeatureMode;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "normconflict-linear-svm";

fn write_row(out: &mut String, tag: &str, values: &[f64]) {
    out.push_str(tag);
    for v in values {
        write!(out, " {v:?}").expect("writing to a String");
    }
    out.push('\n');
}

pub fn write_model<W: Write>(model: &LinearModel, mut writer: W) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "{MAGIC} {MODEL_FORMAT_VERSION}").unwrap();
    writeln!(out, "shape {} {}", model.num_classes(), model.dim).unwrap();
    writeln!(out, "mode {}", model.feature_mode).unwrap();
    let names: Vec<&str> = model.classes.iter().map(|c| c.as_str()).collect();
    writeln!(out, "classes {}", names.join(" ")).unwrap();
    write_row(&mut out, "bias", &model.biases);
    for k in 0..model.num_classes() {
        write_row(&mut out, "w", model.row(k));
    }
    writer.write_all(out.as_bytes())?;
    writer.flush()?;
    Ok(())
}

pub fn save_model(model: &LinearModel, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_model(model, &file)?;
    file.sync_all()?;
    Ok(())
}

fn malformed(msg: impl Into<String>) -> ClassifierError {
    ClassifierError::MalformedModel(msg.into())
}

fn tagged<'a>(line: Option<&'a str>, tag: &str) -> Result<Vec<&'a str>> {
    let line = line.ok_or_else(|| malformed(format!("missing {tag} line")))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(malformed(format!("expected {tag} line")));
    }
    Ok(parts.collect())
}

fn floats(parts: &[&str], expected: usize, what: &str) -> Result<Vec<f64>> {
    if parts.len() != expected {
        return Err(malformed(format!("{what}: expected {expected} values, found {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| malformed(format!("{what}: bad number {p:?}"))))
        .collect()
}

pub fn read_model<R: Read>(reader: R) -> Result<LinearModel> {
    let mut text = String::new();
    BufReader::new(reader).read_to_string(&mut text)?;
    let mut lines = text.lines();

    let header = lines.next().unwrap_or("");
    let mut head = header.split_whitespace();
    if head.next() != Some(MAGIC) {
        return Err(ClassifierError::VersionMismatch { found: header.to_string() });
    }
    let version = head.next().unwrap_or("");
    if version != MODEL_FORMAT_VERSION.to_string() {
        return Err(ClassifierError::VersionMismatch { found: version.to_string() });
    }

    let shape = tagged(lines.next(), "shape")?;
    let [k, d] = shape[..] else { return Err(malformed("shape needs two values")) };
    let k: usize = k.parse().map_err(|_| malformed("bad class count"))?;
    let dim: usize = d.parse().map_err(|_| malformed("bad dimension"))?;

    let mode = tagged(lines.next(), "mode")?;
    let feature_mode = match mode[..] {
        [m] => m.parse::<FeatureMode>().map_err(malformed)?,
        _ => return Err(malformed("mode needs one value")),
    };

    let names = tagged(lines.next(), "classes")?;
    if names.len() != k {
        return Err(malformed(format!("expected {k} classes, found {}", names.len())));
    }
    let classes = names
        .iter()
        .map(|n| n.parse::<ConflictLabel>().map_err(|e| malformed(e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let biases = floats(&tagged(lines.next(), "bias")?, k, "bias")?;
    let mut weights = Vec::with_capacity(k * dim);
    for row in 0..k {
        weights.extend(floats(&tagged(lines.next(), "w")?, dim, &format!("weight row {row}"))?);
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(malformed("trailing content"));
    }
    Ok(LinearModel { classes, weights, biases, feature_mode, dim })
}

pub fn load_model(path: &Path) -> Result<LinearModel> {
    read_model(File::open(path)?)
}
