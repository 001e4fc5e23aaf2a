//! Candidate set JSON: the commands plus every indexed grammar candidate.

use std::path::Path;

use anyhow::{Context, Result};
use gramaug_core::{Candidate, CandidateSet, Command, CommandSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct CandidateFile {
    commands: Vec<Command>,
    candidates: Vec<Candidate>,
}

/// Writes the candidate set with its command mapping.
pub fn write_candidates(path: &Path, commands: &CommandSet, set: &CandidateSet) -> Result<()> {
    let file = CandidateFile {
        commands: commands.commands().to_vec(),
        candidates: set.candidates().to_vec(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Reads and revalidates a candidate set and its command mapping.
pub fn read_candidates(path: &Path) -> Result<(CommandSet, CandidateSet)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: CandidateFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let commands = CommandSet::from_commands(file.commands)
        .with_context(|| format!("commands in {}", path.display()))?;
    let set = CandidateSet::from_candidates(file.candidates, commands.len())
        .with_context(|| format!("candidates in {}", path.display()))?;
    Ok((commands, set))
}
