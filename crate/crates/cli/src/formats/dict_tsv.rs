//! Pronunciation dictionary TSV: `word  variant  count  frequency`.
//!
//! Frequencies print in Rust's shortest round-trip form, so a written
//! file reloads to the exact same dictionary.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gramaug_core::PronDictionary;

/// Writes the dictionary, one variant per row, in dictionary order.
pub fn write_dict(path: &Path, dict: &PronDictionary) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["word", "variant", "count", "frequency"])?;
    for (word, entry) in dict.iter() {
        for v in &entry.variants {
            w.write_record([
                word,
                v.variant.as_str(),
                &v.count.to_string(),
                &v.frequency.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a dictionary TSV, reconstructing per-word totals from the
/// count/frequency pairs.
pub fn read_dict(path: &Path) -> Result<PronDictionary> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut words: BTreeMap<String, (u64, Vec<(String, u64)>)> = BTreeMap::new();
    for (line, record) in r.records().enumerate() {
        let record = record.with_context(|| format!("{}:{}", path.display(), line + 2))?;
        if record.len() != 4 {
            bail!("{}:{}: expected 4 columns", path.display(), line + 2);
        }
        let word = record[0].to_string();
        let variant = record[1].to_string();
        let count: u64 = record[2]
            .parse()
            .with_context(|| format!("{}:{}: bad count", path.display(), line + 2))?;
        let frequency: f64 = record[3]
            .parse()
            .with_context(|| format!("{}:{}: bad frequency", path.display(), line + 2))?;
        if !(frequency > 0.0 && frequency <= 1.0) {
            bail!("{}:{}: frequency {frequency} out of range", path.display(), line + 2);
        }
        let total = (count as f64 / frequency).round() as u64;
        if total == 0 || (count as f64 / total as f64 - frequency).abs() > 1e-9 {
            bail!(
                "{}:{}: count {count} and frequency {frequency} are inconsistent",
                path.display(),
                line + 2
            );
        }
        let slot = words.entry(word.clone()).or_insert((total, Vec::new()));
        if slot.0 != total {
            bail!(
                "{}:{}: word {word:?} implies total {total}, earlier rows said {}",
                path.display(),
                line + 2,
                slot.0
            );
        }
        slot.1.push((variant, count));
    }
    Ok(PronDictionary::from_counts(
        words
            .into_iter()
            .map(|(word, (total, variants))| (word, total, variants)),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_read_round_trip_is_exact() {
        let dict = PronDictionary::from_counts([
            (
                "set".to_string(),
                1000,
                vec![
                    ("set".to_string(), 322),
                    ("said".to_string(), 166),
                    ("sat".to_string(), 114),
                ],
            ),
            (
                "two".to_string(),
                300,
                vec![("to".to_string(), 160), ("two".to_string(), 104)],
            ),
        ])
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dict.tsv");
        write_dict(&path, &dict).unwrap();
        let back = read_dict(&path).unwrap();
        assert_eq!(back, dict);
    }

    #[test]
    fn inconsistent_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dict.tsv");
        std::fs::write(
            &path,
            "word\tvariant\tcount\tfrequency\nset\tset\t10\t0.5\nset\tsaid\t10\t0.25\n",
        )
        .unwrap();
        // 10/0.5 implies total 20 but 10/0.25 implies 40.
        assert!(read_dict(&path).is_err());
    }
}
