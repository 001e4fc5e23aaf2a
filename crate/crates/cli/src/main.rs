//! `gramaug` — grammar augmentation for CTC voice command recognition.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use gramaug_core::search::SearchConfig;
use gramaug_core::{Alphabet, VariantPolicy};
use gramaug_cli::bench::{make_benchmark, SplitSizes};
use gramaug_cli::formats::{commands as commands_fmt, confusions, pgrm};
use gramaug_cli::ops::{self, Algorithm};
use gramaug_cli::pipeline;

#[derive(Parser)]
#[command(
    name = "gramaug",
    about = "Augment voice-command grammars with the variants a small CTC acoustic model actually emits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic benchmark: posteriorgrams plus
    /// train/validation/test/ood manifests.
    Simulate(SimulateArgs),
    /// Build the statistical pronunciation dictionary from a corpus
    /// manifest.
    BuildDict(BuildDictArgs),
    /// Expand commands against a dictionary into a candidate set.
    GenCandidates(GenCandidatesArgs),
    /// Score every candidate against every utterance once.
    Score(ScoreArgs),
    /// Search for an augmented grammar over a precomputed score matrix.
    Search(SearchArgs),
    /// Evaluate an explicit grammar mask against a score matrix.
    Evaluate(EvaluateArgs),
    /// Run the whole pipeline from a TOML config.
    Run(RunArgs),
    /// Print a posteriorgram file as its JSON debug form.
    DumpPgrm(DumpPgrmArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Command list file, one command per line.
    #[arg(long)]
    commands: PathBuf,
    /// Confusion table JSON.
    #[arg(long)]
    confusions: PathBuf,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Utterances per command: train,validation,test.
    #[arg(long, default_value = "200,100,100")]
    sizes: String,
    /// Out-of-domain texts, one per line.
    #[arg(long)]
    ood: PathBuf,
    /// Renders per out-of-domain text.
    #[arg(long, default_value_t = 1)]
    ood_repeat: usize,
    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frames per rendered character.
    #[arg(long, default_value_t = 3)]
    frames_per_char: usize,
    /// Blank insertion probability at character boundaries.
    #[arg(long, default_value_t = 0.2)]
    blank_insert_prob: f64,
    /// Peak probability per frame.
    #[arg(long, default_value_t = 0.85)]
    peak_prob: f64,
    /// Noise temperature for the off-peak mass.
    #[arg(long, default_value_t = 1.0)]
    noise_temperature: f64,
}

#[derive(Args)]
struct BuildDictArgs {
    /// Corpus manifest (JSONL).
    #[arg(long)]
    manifest: PathBuf,
    /// Output dictionary TSV.
    #[arg(long)]
    out: PathBuf,
    /// Drop variants observed fewer times than this.
    #[arg(long, default_value_t = 1)]
    min_count: u64,
    /// Also dump every aligned word pair as a truth/decoded/op TSV.
    #[arg(long)]
    dump_alignments: Option<PathBuf>,
}

#[derive(Args)]
struct GenCandidatesArgs {
    /// Command list file.
    #[arg(long)]
    commands: PathBuf,
    /// Dictionary TSV.
    #[arg(long)]
    dict: PathBuf,
    /// Fixed top-k variants per word.
    #[arg(long, conflicts_with = "coverage")]
    k: Option<usize>,
    /// Coverage target in (0, 1] choosing k per word.
    #[arg(long)]
    coverage: Option<f64>,
    /// Cap on the total candidate count.
    #[arg(long)]
    cap: Option<usize>,
    /// Output candidate JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Candidate JSON.
    #[arg(long)]
    candidates: PathBuf,
    /// In-domain corpus manifest; repeat for several splits.
    #[arg(long, required = true)]
    manifest: Vec<PathBuf>,
    /// Out-of-domain corpus manifest.
    #[arg(long)]
    ood: PathBuf,
    /// Output score matrix (.scmx plus .meta.json sidecar).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Score matrix file.
    #[arg(long)]
    scores: PathBuf,
    /// greedy | refined | beam | cem | exhaustive.
    #[arg(long)]
    algo: String,
    /// False-alarm rate target.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Misdetection weight.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Beam width.
    #[arg(long, default_value_t = 5)]
    beam_width: usize,
    /// CEM population size.
    #[arg(long, default_value_t = 100)]
    cem_pop: usize,
    /// CEM elite fraction.
    #[arg(long, default_value_t = 0.1)]
    cem_elite: f64,
    /// CEM iterations.
    #[arg(long, default_value_t = 50)]
    cem_iters: usize,
    /// CEM smoothing toward the elite statistics.
    #[arg(long, default_value_t = 0.7)]
    cem_smoothing: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional evaluation budget.
    #[arg(long)]
    eval_budget: Option<u64>,
    /// Only use in-domain columns whose utterance id starts with this.
    #[arg(long)]
    split_prefix: Option<String>,
    /// Output prefix for .mask.txt / .result.json / .trace.csv.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Score matrix file.
    #[arg(long)]
    scores: PathBuf,
    /// Grammar mask: bitstring or 0x-prefixed hex.
    #[arg(long)]
    mask: String,
    /// False-alarm rate target.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Misdetection weight.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Only use in-domain columns whose utterance id starts with this.
    #[arg(long)]
    split_prefix: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline TOML config.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct DumpPgrmArgs {
    /// Posteriorgram file.
    #[arg(long)]
    pgrm: PathBuf,
    /// Utterance id to embed in the debug form.
    #[arg(long, default_value = "unknown")]
    utterance_id: String,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let alphabet = Alphabet::standard();
    match cli.command {
        Command::Simulate(args) => {
            let commands = commands_fmt::read_commands(&args.commands)?;
            let table = confusions::read_confusions(&args.confusions)?;
            let ood_texts: Vec<String> = std::fs::read_to_string(&args.ood)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect();
            let sim = gramaug_core::SimConfig {
                frames_per_char: args.frames_per_char,
                blank_insert_prob: args.blank_insert_prob,
                peak_prob: args.peak_prob,
                noise_temperature: args.noise_temperature,
                rng_seed: args.seed,
            };
            let sizes = SplitSizes::parse(&args.sizes)?;
            let paths = make_benchmark(
                &args.out_dir,
                &commands,
                &table,
                &sim,
                sizes,
                &ood_texts,
                args.ood_repeat,
                &alphabet,
            )?;
            println!("wrote benchmark under {}", args.out_dir.display());
            println!("  train:      {}", paths.train().display());
            println!("  validation: {}", paths.validation().display());
            println!("  test:       {}", paths.test().display());
            println!("  ood:        {}", paths.ood_manifest.display());
        }
        Command::BuildDict(args) => {
            let stats = ops::build_dict(
                &args.manifest,
                &args.out,
                args.min_count,
                &alphabet,
                args.dump_alignments.as_deref(),
            )?;
            println!(
                "wrote {} ({} words from {} utterances, {} skipped)",
                args.out.display(),
                stats.words,
                stats.utterances,
                stats.skipped
            );
        }
        Command::GenCandidates(args) => {
            let policy = match (args.k, args.coverage) {
                (Some(k), None) => VariantPolicy::TopK(k),
                (None, Some(target)) => VariantPolicy::Coverage(target),
                (None, None) => bail!("one of --k or --coverage is required"),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let size = ops::gen_candidates(&args.commands, &args.dict, policy, args.cap, &args.out)?;
            println!("wrote {} ({} candidates)", args.out.display(), size);
        }
        Command::Score(args) => {
            let (rows, cols) =
                ops::score(&args.candidates, &args.manifest, &args.ood, &args.out, &alphabet)?;
            println!("wrote {} ({rows} candidates x {cols} utterances)", args.out.display());
        }
        Command::Search(args) => {
            let algorithm = Algorithm::parse(&args.algo)?;
            let cfg = SearchConfig {
                alpha: args.alpha,
                beta: args.beta,
                beam_width: args.beam_width,
                cem_population: args.cem_pop,
                cem_elite_fraction: args.cem_elite,
                cem_iterations: args.cem_iters,
                cem_smoothing: args.cem_smoothing,
                rng_seed: args.seed,
                eval_budget: args.eval_budget,
                ..SearchConfig::default()
            };
            let summary = ops::search(
                &args.scores,
                algorithm,
                &cfg,
                args.split_prefix.as_deref(),
                &args.out_prefix,
            )?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Evaluate(args) => {
            let result = ops::evaluate_mask(
                &args.scores,
                &args.mask,
                args.alpha,
                args.beta,
                args.split_prefix.as_deref(),
            )?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            println!("tau,far,mdr,mcr,objective");
            println!(
                "{},{},{},{},{}",
                result.tau, result.far, result.mdr, result.mcr, result.objective
            );
        }
        Command::Run(args) => {
            let outcome = pipeline::run_pipeline(&args.config)?;
            for (stage, status) in &outcome.stages {
                println!("{stage}: {status:?}");
            }
            println!("report: {}", outcome.report_path.display());
            for csv in &outcome.csv_paths {
                println!("csv:    {}", csv.display());
            }
        }
        Command::DumpPgrm(args) => {
            let p = pgrm::read_pgrm(&args.pgrm, &args.utterance_id)?;
            let json = pgrm::to_debug_json(&p, &alphabet);
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
    }
    Ok(())
}
