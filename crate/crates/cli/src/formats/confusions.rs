//! Confusion table JSON: `{"word": [["rendered", prob], ...], ...}`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use gramaug_core::ConfusionTable;

/// Reads and validates a confusion table.
pub fn read_confusions(path: &Path) -> Result<ConfusionTable> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: BTreeMap<String, Vec<(String, f64)>> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    ConfusionTable::new(raw).with_context(|| format!("confusion table in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_word_rendering_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("confusions.json");
        std::fs::write(
            &path,
            r#"{"pause": [["pause", 0.6], ["pose", 0.4]], "two": [["to", 1.0]]}"#,
        )
        .unwrap();
        let table = read_confusions(&path).unwrap();
        assert_eq!(
            table.renderings("pause").unwrap(),
            &[("pause".to_string(), 0.6), ("pose".to_string(), 0.4)]
        );
    }

    #[test]
    fn bad_probabilities_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("confusions.json");
        std::fs::write(&path, r#"{"pause": [["pose", 0.4]]}"#).unwrap();
        assert!(read_confusions(&path).is_err());
    }
}
