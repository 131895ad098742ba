//! Contracts, norms, labeled norm pairs and the line-delimited dataset format.
//!
//! A dataset file holds one JSON object per line:
//!
//! ```text
//! {"id":"p1","norm1":"Seller may sell.","norm2":"Seller shall not sell.","label":"deontic-modality","provenance":"original"}
//! ```
//!
//! `provenance` defaults to `original` when absent. Blank lines are ignored.

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed record on line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("duplicate pair id {0:?}")]
    DuplicateId(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("contract {id:?}: {reason}")]
    InvalidContract { id: String, reason: String },
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeonticMeaning {
    Obligation,
    Permission,
    Prohibition,
}

impl DeonticMeaning {
    pub const ALL: [DeonticMeaning; 3] =
        [DeonticMeaning::Obligation, DeonticMeaning::Permission, DeonticMeaning::Prohibition];

    pub fn as_str(self) -> &'static str {
        match self {
            DeonticMeaning::Obligation => "obligation",
            DeonticMeaning::Permission => "permission",
            DeonticMeaning::Prohibition => "prohibition",
        }
    }
}

impl FromStr for DeonticMeaning {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "obligation" => Ok(DeonticMeaning::Obligation),
            "permission" => Ok(DeonticMeaning::Permission),
            "prohibition" => Ok(DeonticMeaning::Prohibition),
            other => Err(format!("unknown deontic meaning {other:?}")),
        }
    }
}

impl fmt::Display for DeonticMeaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conflict typology plus the non-conflict class.
///
/// The declaration order is the canonical class order used by models and
/// confusion matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConflictLabel {
    NonConflict,
    DeonticModality,
    DeonticStructure,
    DeonticObject,
    ObjectConditional,
}

impl ConflictLabel {
    pub const ALL: [ConflictLabel; 5] = [
        ConflictLabel::NonConflict,
        ConflictLabel::DeonticModality,
        ConflictLabel::DeonticStructure,
        ConflictLabel::DeonticObject,
        ConflictLabel::ObjectConditional,
    ];

    pub const CONFLICTS: [ConflictLabel; 4] = [
        ConflictLabel::DeonticModality,
        ConflictLabel::DeonticStructure,
        ConflictLabel::DeonticObject,
        ConflictLabel::ObjectConditional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConflictLabel::NonConflict => "non-conflict",
            ConflictLabel::DeonticModality => "deontic-modality",
            ConflictLabel::DeonticStructure => "deontic-structure",
            ConflictLabel::DeonticObject => "deontic-object",
            ConflictLabel::ObjectConditional => "object-conditional",
        }
    }

    /// Two-letter abbreviation used in confusion grids.
    pub fn short(self) -> &'static str {
        match self {
            ConflictLabel::NonConflict => "NC",
            ConflictLabel::DeonticModality => "DM",
            ConflictLabel::DeonticStructure => "DS",
            ConflictLabel::DeonticObject => "DO",
            ConflictLabel::ObjectConditional => "OC",
        }
    }

    pub fn is_conflict(self) -> bool {
        self != ConflictLabel::NonConflict
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for ConflictLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        ConflictLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownLabel(s.to_string()))
    }
}

impl fmt::Display for ConflictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Original,
    Authored,
    Generated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Authored => "authored",
            Provenance::Generated => "generated",
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "original" => Ok(Provenance::Original),
            "authored" => Ok(Provenance::Authored),
            "generated" => Ok(Provenance::Generated),
            other => Err(format!("unknown provenance {other:?}")),
        }
    }
}

/// One norm sentence found in a contract body.
///
/// `span` is a byte range into the contract body; `modal_span` is a byte
/// range into `text`. Party, action and condition are free-text annotations
/// that are never filled automatically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Norm {
    pub id: String,
    pub contract_id: String,
    pub text: String,
    pub span: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modality: Option<DeonticMeaning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modal_span: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub party: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub id: String,
    pub title: String,
    pub body: String,
    pub norms: Vec<Norm>,
}

impl Contract {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(CorpusError::InvalidContract { id, reason: "empty id".into() });
        }
        Ok(Self { id, title: title.into(), body: body.into(), norms: Vec::new() })
    }

    /// Reads a plain-text contract; the id and title are the file stem.
    pub fn from_file(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::new(stem.clone(), stem, body)
    }

    /// Checks that every norm's span lies inside the body and matches its text.
    pub fn validate(&self) -> Result<()> {
        for norm in &self.norms {
            let (start, end) = norm.span;
            let matches = self.body.get(start..end).is_some_and(|s| s == norm.text);
            if !matches {
                return Err(CorpusError::InvalidContract {
                    id: self.id.clone(),
                    reason: format!("norm {} span {start}..{end} does not match its text", norm.id),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormPair {
    pub id: String,
    pub norm1_text: String,
    pub norm2_text: String,
    pub label: ConflictLabel,
    pub provenance: Provenance,
    pub annotator: Option<String>,
}

impl NormPair {
    pub fn new(
        id: impl Into<String>,
        norm1: impl Into<String>,
        norm2: impl Into<String>,
        label: ConflictLabel,
        provenance: Provenance,
    ) -> Self {
        Self {
            id: id.into(),
            norm1_text: norm1.into(),
            norm2_text: norm2.into(),
            label,
            provenance,
            annotator: None,
        }
    }
}

/// On-disk shape of a [`NormPair`].
#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    norm1: &'a str,
    norm2: &'a str,
    label: &'static str,
    provenance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    annotator: Option<&'a str>,
}

#[derive(Deserialize)]
struct RecordIn {
    id: String,
    norm1: String,
    norm2: String,
    label: String,
    #[serde(default)]
    provenance: Option<String>,
    #[serde(default)]
    annotator: Option<String>,
}

/// Serializes one pair as a dataset line, without the trailing newline.
pub fn pair_to_line(pair: &NormPair) -> String {
    let record = RecordOut {
        id: &pair.id,
        norm1: &pair.norm1_text,
        norm2: &pair.norm2_text,
        label: pair.label.as_str(),
        provenance: pair.provenance.as_str(),
        annotator: pair.annotator.as_deref(),
    };
    serde_json::to_string(&record).expect("string fields always serialize")
}

/// Parses one dataset line. `line_no` is 1-based and only used in errors.
pub fn pair_from_line(line: &str, line_no: usize) -> Result<NormPair> {
    let malformed = |reason: String| CorpusError::MalformedRecord { line: line_no, reason };
    let raw: RecordIn = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
    if raw.id.is_empty() {
        return Err(malformed("empty id".into()));
    }
    if raw.norm1.trim().is_empty() || raw.norm2.trim().is_empty() {
        return Err(malformed("empty norm text".into()));
    }
    let label = raw.label.parse::<ConflictLabel>()?;
    let provenance = match raw.provenance {
        Some(p) => p.parse().map_err(malformed)?,
        None => Provenance::Original,
    };
    Ok(NormPair {
        id: raw.id,
        norm1_text: raw.norm1,
        norm2_text: raw.norm2,
        label,
        provenance,
        annotator: raw.annotator,
    })
}

/// An ordered collection of labeled pairs with unique ids.
///
/// The name is metadata (the file stem on load) and does not take part in
/// equality.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub name: String,
    pub pairs: Vec<NormPair>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl Dataset {
    /// Builds a dataset, rejecting duplicate ids.
    pub fn new(name: impl Into<String>, pairs: Vec<NormPair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            if !seen.insert(p.id.as_str()) {
                return Err(CorpusError::DuplicateId(p.id.clone()));
            }
        }
        Ok(Self { name: name.into(), pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn from_reader<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let pair = pair_from_line(&line, i + 1)?;
            if !seen.insert(pair.id.clone()) {
                return Err(CorpusError::DuplicateId(pair.id));
            }
            pairs.push(pair);
        }
        Ok(Self { name: name.into(), pairs })
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for pair in &self.pairs {
            writeln!(writer, "{}", pair_to_line(pair))?;
        }
        writer.flush()
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Dataset::from_reader(name, BufReader::new(file))
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    dataset.write_to(&mut writer)?;
    writer.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCount {
    pub label: ConflictLabel,
    pub count: usize,
    /// Conflict classes: share of all conflicts. Non-conflict: share of all pairs.
    pub fraction: f64,
}

/// Per-class counts in canonical class order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub classes: Vec<ClassCount>,
    pub conflicts: usize,
    pub total: usize,
}

impl DatasetStats {
    pub fn from_counts(counts: [usize; 5]) -> Self {
        let total: usize = counts.iter().sum();
        let conflicts = total - counts[ConflictLabel::NonConflict.index()];
        let classes = ConflictLabel::ALL
            .into_iter()
            .map(|label| {
                let count = counts[label.index()];
                let denom = if label.is_conflict() { conflicts } else { total };
                let fraction = if denom == 0 { 0.0 } else { count as f64 / denom as f64 };
                ClassCount { label, count, fraction }
            })
            .collect();
        Self { classes, conflicts, total }
    }

    pub fn count(&self, label: ConflictLabel) -> usize {
        self.classes[label.index()].count
    }

    pub fn fraction(&self, label: ConflictLabel) -> f64 {
        self.classes[label.index()].fraction
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:>8} {:>8}", "conflict type", "count", "share")?;
        for row in &self.classes {
            writeln!(
                f,
                "{:<20} {:>8} {:>7.0}%",
                row.label.as_str(),
                row.count,
                row.fraction * 100.0
            )?;
        }
        writeln!(f, "{:<20} {:>8}", "conflicts", self.conflicts)?;
        writeln!(f, "{:<20} {:>8}", "total", self.total)
    }
}

pub fn dataset_stats(dataset: &Dataset) -> DatasetStats {
    let mut counts = [0usize; 5];
    for p in &dataset.pairs {
        counts[p.label.index()] += 1;
    }
    DatasetStats::from_counts(counts)
}

/// Concatenates `a` and `b`. Ids in `b` that collide with an id already in
/// the result are renamed `<id>~1`, `<id>~2`, ... (first free suffix).
pub fn merge_datasets(a: &Dataset, b: &Dataset) -> Dataset {
    let mut seen: HashSet<String> = a.pairs.iter().map(|p| p.id.clone()).collect();
    let mut pairs = a.pairs.clone();
    for pair in &b.pairs {
        let mut pair = pair.clone();
        if seen.contains(&pair.id) {
            let base = pair.id.clone();
            let mut n = 1;
            while seen.contains(&format!("{base}~{n}")) {
                n += 1;
            }
            pair.id = format!("{base}~{n}");
        }
        seen.insert(pair.id.clone());
        pairs.push(pair);
    }
    Dataset { name: a.name.clone(), pairs }
}
