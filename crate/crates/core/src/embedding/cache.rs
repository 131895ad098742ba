//! Cache of embedded pair features, one JSON record per line:
//! `{"pair_id":"p1","mode":"offset","vector":[0.1,-0.2]}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EmbeddingError, FeatureMode, PairFeature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedFeature {
    pub pair_id: String,
    pub mode: FeatureMode,
    pub vector: Vec<f64>,
}

impl CachedFeature {
    pub fn new(pair_id: impl Into<String>, feature: &PairFeature) -> Self {
        Self { pair_id: pair_id.into(), mode: feature.mode, vector: feature.vector.clone() }
    }

    pub fn feature(&self) -> PairFeature {
        PairFeature { vector: self.vector.clone(), mode: self.mode }
    }
}

pub fn write_pair_cache<W: Write>(mut writer: W, records: &[CachedFeature]) -> Result<(), EmbeddingError> {
    for record in records {
        let line = serde_json::to_string(record).map_err(std::io::Error::other)?;
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_pair_cache<R: BufRead>(reader: R) -> Result<Vec<CachedFeature>, EmbeddingError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CachedFeature = serde_json::from_str(&line)
            .map_err(|e| EmbeddingError::MalformedCache { line: i + 1, reason: e.to_string() })?;
        out.push(record);
    }
    Ok(out)
}
