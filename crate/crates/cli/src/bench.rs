//! Synthetic benchmark writer: renders command and out-of-domain corpora
//! into posteriorgram files plus train/validation/test/ood manifests.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gramaug_core::sim::render_utterance;
use gramaug_core::{Alphabet, CommandSet, ConfusionTable, SimConfig};

use crate::formats::manifest::{write_manifest, ManifestRecord};
use crate::formats::pgrm::write_pgrm;

/// Utterances generated per command for each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    /// Train split, used by the search objective (and the dictionary).
    pub train: usize,
    /// Validation split, used to pick among algorithms.
    pub validation: usize,
    /// Test split, used only for reporting.
    pub test: usize,
}

impl SplitSizes {
    /// Parses the `train,validation,test` CLI form.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            bail!("sizes must be train,validation,test — got {text:?}");
        }
        let parse = |s: &str| -> Result<usize> {
            let n = s.trim().parse::<usize>().context("sizes must be integers")?;
            if n == 0 {
                bail!("split sizes must be at least 1");
            }
            Ok(n)
        };
        Ok(Self {
            train: parse(parts[0])?,
            validation: parse(parts[1])?,
            test: parse(parts[2])?,
        })
    }
}

/// Everything the benchmark writer produced.
#[derive(Debug, Clone)]
pub struct BenchmarkPaths {
    /// Manifest per split, in train/validation/test order.
    pub split_manifests: [PathBuf; 3],
    /// Out-of-domain manifest.
    pub ood_manifest: PathBuf,
    /// Directory holding the posteriorgram files.
    pub pgrm_dir: PathBuf,
}

impl BenchmarkPaths {
    /// The manifest locations a benchmark uses under `out_dir`, without
    /// generating anything.
    pub fn under(out_dir: &Path) -> Self {
        Self {
            split_manifests: [
                out_dir.join("train.jsonl"),
                out_dir.join("validation.jsonl"),
                out_dir.join("test.jsonl"),
            ],
            ood_manifest: out_dir.join("ood.jsonl"),
            pgrm_dir: out_dir.join("pgrm"),
        }
    }

    /// Train manifest path.
    pub fn train(&self) -> &Path {
        &self.split_manifests[0]
    }

    /// Validation manifest path.
    pub fn validation(&self) -> &Path {
        &self.split_manifests[1]
    }

    /// Test manifest path.
    pub fn test(&self) -> &Path {
        &self.split_manifests[2]
    }
}

/// Renders the full benchmark under `out_dir`.
///
/// Splits are disjoint by construction; every utterance gets its own seed
/// derived from the root seed and a fixed generation order, so the same
/// inputs produce byte-identical files. Each out-of-domain text is
/// rendered `ood_repeat` times.
#[allow(clippy::too_many_arguments)]
pub fn make_benchmark(
    out_dir: &Path,
    commands: &CommandSet,
    table: &ConfusionTable,
    sim: &SimConfig,
    sizes: SplitSizes,
    ood_texts: &[String],
    ood_repeat: usize,
    alphabet: &Alphabet,
) -> Result<BenchmarkPaths> {
    if ood_texts.is_empty() {
        bail!("at least one out-of-domain text is required");
    }
    if ood_repeat == 0 {
        bail!("ood_repeat must be at least 1");
    }
    for text in ood_texts {
        if commands.commands().iter().any(|c| c.text == *text) {
            bail!("out-of-domain text {text:?} is one of the commands");
        }
    }
    table.validate_against(alphabet)?;

    let paths = BenchmarkPaths::under(out_dir);
    std::fs::create_dir_all(&paths.pgrm_dir)
        .with_context(|| format!("creating {}", paths.pgrm_dir.display()))?;

    // One seed per utterance, derived from a running counter in a fixed
    // generation order.
    let mut counter: u64 = 0;
    let mut derive_seed = || {
        let seed = sim
            .rng_seed
            .wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        counter += 1;
        seed
    };

    let render_to_file =
        |id: &str, transcript: &str, seed: u64| -> Result<ManifestRecord> {
            let p = render_utterance(id, transcript, table, &sim.with_seed(seed), alphabet)
                .with_context(|| format!("rendering {id:?}"))?;
            let file = paths.pgrm_dir.join(format!("{id}.pgrm"));
            write_pgrm(&file, &p)?;
            Ok(ManifestRecord {
                utterance_id: id.to_string(),
                transcript: transcript.to_string(),
                posteriorgram_path: format!("pgrm/{id}.pgrm"),
            })
        };

    let split_counts = [sizes.train, sizes.validation, sizes.test];
    for (split_index, split_name) in ["train", "validation", "test"].iter().enumerate() {
        let mut records = Vec::new();
        for command in commands.commands() {
            for i in 0..split_counts[split_index] {
                let id = format!("{split_name}-c{:02}-{i:04}", command.id);
                let seed = derive_seed();
                records.push(render_to_file(&id, &command.text, seed)?);
            }
        }
        write_manifest(&paths.split_manifests[split_index], &records)?;
    }

    let mut ood_records = Vec::new();
    for repeat in 0..ood_repeat {
        for (j, text) in ood_texts.iter().enumerate() {
            let id = format!("ood-r{repeat:02}-{j:04}");
            let seed = derive_seed();
            ood_records.push(render_to_file(&id, text, seed)?);
        }
    }
    write_manifest(&paths.ood_manifest, &ood_records)?;

    Ok(paths)
}
