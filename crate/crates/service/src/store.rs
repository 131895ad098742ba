//! Append-only pair store backed by a dataset file.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use normconflict_core::corpus::{load_dataset, pair_to_line, DatasetStats, NormPair};

use crate::ServiceError;

/// Appends pairs to a dataset file. Existing lines are never rewritten.
///
/// Every append writes one complete line and syncs it to disk before
/// returning.
#[derive(Debug)]
pub struct AnnotationStore {
    path: PathBuf,
    file: File,
    ids: HashSet<String>,
    counts: [usize; 5],
    next_seq: u64,
}

impl AnnotationStore {
    /// Opens `path`, creating it if missing. Existing records are validated
    /// by a full load.
    pub fn open(path: &Path) -> Result<Self, ServiceError> {
        let existing = if path.exists() { load_dataset(path)?.pairs } else { Vec::new() };
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;

        // A file cut off after its last record still needs a line break
        // before the next append.
        let len = file.metadata()?.len();
        if len > 0 {
            let mut last = [0u8; 1];
            file.seek(SeekFrom::Start(len - 1))?;
            file.read_exact(&mut last)?;
            if last[0] != b'\n' {
                file.write_all(b"\n")?;
                file.sync_data()?;
            }
        }

        let mut counts = [0; 5];
        for p in &existing {
            counts[p.label.index()] += 1;
        }
        Ok(Self {
            path: path.to_path_buf(),
            file,
            ids: existing.iter().map(|p| p.id.clone()).collect(),
            counts,
            next_seq: existing.len() as u64 + 1,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Next free id of the form `a<seq>`.
    fn fresh_id(&mut self) -> String {
        loop {
            let id = format!("a{:06}", self.next_seq);
            self.next_seq += 1;
            if !self.ids.contains(&id) {
                return id;
            }
        }
    }

    /// Assigns an id to `pair`, appends it and syncs. Returns the stored pair.
    pub fn append(&mut self, mut pair: NormPair) -> Result<NormPair, ServiceError> {
        pair.id = self.fresh_id();
        let mut line = pair_to_line(&pair);
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.ids.insert(pair.id.clone());
        self.counts[pair.label.index()] += 1;
        Ok(pair)
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats::from_counts(self.counts)
    }
}
