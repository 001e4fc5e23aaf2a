//! Score matrix container: binary grid plus a JSON metadata sidecar.
//!
//! Binary layout: magic `SCMX`, version `u32`, `rows u32`, `cols u32`,
//! then `rows·cols` little-endian `f64` values, row-major. The sidecar
//! `<path>.meta.json` carries the candidate rows, utterance columns, and
//! command count needed to evaluate selections.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use byteorder::{ReadBytesExt, WriteBytesExt, LE};
use gramaug_core::{Candidate, ScoreMatrix, UtteranceInfo};
use serde::{Deserialize, Serialize};

const MAGIC: &[u8; 4] = b"SCMX";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Metadata {
    n_commands: usize,
    rows: Vec<Candidate>,
    columns: Vec<UtteranceInfo>,
}

/// The sidecar path for a matrix file.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes the grid and its metadata sidecar.
pub fn write_score_matrix(path: &Path, m: &ScoreMatrix) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u32::<LE>(m.num_candidates() as u32)?;
    w.write_u32::<LE>(m.num_utterances() as u32)?;
    for &score in m.scores() {
        w.write_f64::<LE>(score)?;
    }
    w.flush()?;

    let meta = Metadata {
        n_commands: m.num_commands(),
        rows: m.candidates().to_vec(),
        columns: m.columns().to_vec(),
    };
    let sidecar = meta_path(path);
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing {}", sidecar.display()))?;
    Ok(())
}

/// Reads a matrix and revalidates it.
pub fn read_score_matrix(path: &Path) -> Result<ScoreMatrix> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .with_context(|| format!("reading {}", path.display()))?;
    if &magic != MAGIC {
        bail!("{} is not a score matrix file (bad magic)", path.display());
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        bail!("{}: unsupported score matrix version {version}", path.display());
    }
    let rows = r.read_u32::<LE>()? as usize;
    let cols = r.read_u32::<LE>()? as usize;
    let mut scores = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        scores.push(r.read_f64::<LE>()?);
    }

    let sidecar = meta_path(path);
    let text = std::fs::read_to_string(&sidecar)
        .with_context(|| format!("reading {}", sidecar.display()))?;
    let meta: Metadata =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", sidecar.display()))?;
    if meta.rows.len() != rows || meta.columns.len() != cols {
        bail!(
            "{}: metadata is {}x{} but the grid is {rows}x{cols}",
            sidecar.display(),
            meta.rows.len(),
            meta.columns.len()
        );
    }
    Ok(ScoreMatrix::from_parts(
        meta.rows,
        meta.n_commands,
        meta.columns,
        scores,
    )?)
}
