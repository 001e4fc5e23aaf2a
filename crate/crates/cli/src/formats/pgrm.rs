//! Posteriorgram container: a binary grid plus a JSON debug form.
//!
//! Binary layout: magic `PGRM`, version `u32`, `T u32`, `V u32`, then
//! `T·V` little-endian `f32` values, row-major. The utterance id travels
//! in the corpus manifest, not in the file.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use byteorder::{ReadBytesExt, WriteBytesExt, LE};
use gramaug_core::{Alphabet, Posteriorgram};
use serde::{Deserialize, Serialize};

const MAGIC: &[u8; 4] = b"PGRM";
const VERSION: u32 = 1;

/// Writes the binary posteriorgram container.
pub fn write_pgrm(path: &Path, p: &Posteriorgram) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u32::<LE>(p.num_frames() as u32)?;
    w.write_u32::<LE>(p.num_symbols() as u32)?;
    for &value in p.frames() {
        w.write_f32::<LE>(value as f32)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a binary posteriorgram, renormalizing each row to absorb the
/// `f32` storage rounding.
pub fn read_pgrm(path: &Path, utterance_id: &str) -> Result<Posteriorgram> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .with_context(|| format!("reading {}", path.display()))?;
    if &magic != MAGIC {
        bail!("{} is not a posteriorgram file (bad magic)", path.display());
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        bail!(
            "{}: unsupported posteriorgram version {version}",
            path.display()
        );
    }
    let frames = r.read_u32::<LE>()? as usize;
    let symbols = r.read_u32::<LE>()? as usize;
    let mut grid = Vec::with_capacity(frames * symbols);
    for _ in 0..frames {
        let mut row = Vec::with_capacity(symbols);
        for _ in 0..symbols {
            row.push(r.read_f32::<LE>()? as f64);
        }
        let sum: f64 = row.iter().sum();
        if sum <= 0.0 {
            bail!("{}: zero-mass frame", path.display());
        }
        grid.extend(row.into_iter().map(|v| v / sum));
    }
    Posteriorgram::new(utterance_id, symbols, grid)
        .with_context(|| format!("validating {}", path.display()))
}

/// JSON debug form of a posteriorgram.
#[derive(Debug, Serialize, Deserialize)]
pub struct PgrmJson {
    /// Utterance the frames belong to.
    pub utterance_id: String,
    /// The symbol table the columns refer to.
    pub alphabet: AlphabetJson,
    /// T rows of V probabilities.
    pub frames: Vec<Vec<f64>>,
}

/// JSON form of an alphabet.
#[derive(Debug, Serialize, Deserialize)]
pub struct AlphabetJson {
    /// Index reserved for the CTC blank.
    pub blank_index: usize,
    /// The graphemes in table order, blank excluded.
    pub graphemes: String,
}

impl AlphabetJson {
    /// Converts to a validated [`Alphabet`].
    pub fn to_alphabet(&self) -> Result<Alphabet> {
        Ok(Alphabet::new(self.graphemes.chars(), self.blank_index)?)
    }
}

/// Builds the debug form for a posteriorgram.
pub fn to_debug_json(p: &Posteriorgram, alphabet: &Alphabet) -> PgrmJson {
    PgrmJson {
        utterance_id: p.utterance_id().to_string(),
        alphabet: AlphabetJson {
            blank_index: alphabet.blank_index(),
            graphemes: alphabet.graphemes().iter().collect(),
        },
        frames: p
            .frames()
            .chunks(p.num_symbols())
            .map(<[f64]>::to_vec)
            .collect(),
    }
}

/// Reads the JSON debug form back into a posteriorgram and its alphabet.
pub fn read_pgrm_json(path: &Path) -> Result<(Posteriorgram, Alphabet)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: PgrmJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    let alphabet = json.alphabet.to_alphabet()?;
    let grid: Vec<f64> = json.frames.into_iter().flatten().collect();
    let p = Posteriorgram::new(json.utterance_id, alphabet.size(), grid)?;
    Ok((p, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gramaug_core::sim::{render_utterance, ConfusionTable, SimConfig};

    #[test]
    fn binary_round_trip_preserves_decode() {
        let alphabet = Alphabet::standard();
        let p = render_utterance(
            "u0",
            "pause music",
            &ConfusionTable::identity(),
            &SimConfig::default(),
            &alphabet,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u0.pgrm");
        write_pgrm(&path, &p).unwrap();
        let back = read_pgrm(&path, "u0").unwrap();
        assert_eq!(back.num_frames(), p.num_frames());
        assert_eq!(back.num_symbols(), p.num_symbols());
        // f32 storage perturbs values only marginally.
        for (a, b) in p.frames().iter().zip(back.frames()) {
            assert!((a - b).abs() < 1e-6);
        }
        let d1 = gramaug_core::ctc::greedy_decode(&p, &alphabet).unwrap();
        let d2 = gramaug_core::ctc::greedy_decode(&back, &alphabet).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.pgrm");
        std::fs::write(&path, b"NOPE....").unwrap();
        assert!(read_pgrm(&path, "u").is_err());
    }

    #[test]
    fn json_debug_form_round_trips() {
        let alphabet = Alphabet::standard();
        let p = render_utterance(
            "u1",
            "next song",
            &ConfusionTable::identity(),
            &SimConfig::default(),
            &alphabet,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u1.json");
        let json = to_debug_json(&p, &alphabet);
        std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
        let (back, alpha_back) = read_pgrm_json(&path).unwrap();
        assert_eq!(back, p);
        assert_eq!(alpha_back, alphabet);
    }
}
