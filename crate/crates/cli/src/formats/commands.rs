//! Command list files: one command per line, `#` comments allowed.

use std::path::Path;

use anyhow::{Context, Result};
use gramaug_core::CommandSet;

/// Reads a command set from a plain text file.
pub fn read_commands(path: &Path) -> Result<CommandSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let lines: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    CommandSet::new(lines).with_context(|| format!("command set in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_skips_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("commands.txt");
        std::fs::write(&path, "# bluetooth player\nplay music\nstop music\n\npause music\n")
            .unwrap();
        let set = read_commands(&path).unwrap();
        let texts: Vec<&str> = set.commands().iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, ["play music", "stop music", "pause music"]);
    }
}
