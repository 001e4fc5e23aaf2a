//! Corpus manifests: JSONL, one record per utterance.
//!
//! Posteriorgram paths are stored relative to the manifest file so a
//! corpus directory can be moved or diffed as a unit.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gramaug_core::Posteriorgram;
use serde::{Deserialize, Serialize};

use super::pgrm;

/// One corpus utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    /// Unique utterance id.
    pub utterance_id: String,
    /// Ground-truth transcript.
    pub transcript: String,
    /// Posteriorgram file, relative to the manifest.
    pub posteriorgram_path: String,
}

/// Writes records as JSON lines.
pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    let file =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut w, record)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads all records of a manifest.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ManifestRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        records.push(record);
    }
    Ok(records)
}

/// Resolves a record's posteriorgram path against its manifest location.
pub fn resolve_pgrm_path(manifest_path: &Path, record: &ManifestRecord) -> PathBuf {
    let relative = Path::new(&record.posteriorgram_path);
    if relative.is_absolute() {
        relative.to_path_buf()
    } else {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(relative)
    }
}

/// Loads a manifest and every posteriorgram it references.
pub fn load_utterances(path: &Path) -> Result<Vec<(ManifestRecord, Posteriorgram)>> {
    let records = read_manifest(path)?;
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let pgrm_path = resolve_pgrm_path(path, &record);
        let posteriorgram = pgrm::read_pgrm(&pgrm_path, &record.utterance_id).with_context(|| {
            format!(
                "posteriorgram for utterance {:?} referenced by {}",
                record.utterance_id,
                path.display()
            )
        })?;
        out.push((record, posteriorgram));
    }
    Ok(out)
}
