//! The staged end-to-end pipeline: simulate → build-dict → gen-candidates
//! → score → search → report.
//!
//! Stages persist their outputs and a content-hash stamp; a rerun skips
//! any stage whose inputs (hashed transitively back to the config and
//! source files) are unchanged and whose outputs still exist. All
//! randomness derives from the one seed in the config, so a repeated run
//! yields a byte-identical report.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gramaug_core::eval::GrammarSelection;
use gramaug_core::search::SearchConfig;
use gramaug_core::sim::SimConfig;
use gramaug_core::{Alphabet, EvalResult, VariantPolicy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench::{make_benchmark, BenchmarkPaths, SplitSizes};
use crate::formats::{commands as commands_fmt, confusions, mask, scmx};
use crate::ops::{self, Algorithm, SearchSummary};

/// Flat key-value pipeline configuration (TOML).
///
/// Relative paths resolve against the config file's directory. The raw
/// values are embedded in the report, so reports stay byte-identical
/// across machines as long as the config itself is unchanged.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Command list file (one per line).
    pub commands_file: String,
    /// Confusion table JSON for the simulator.
    pub confusions_file: String,
    /// Out-of-domain texts, one per line.
    pub ood_file: String,
    /// Output directory for every stage artifact.
    pub out_dir: String,

    /// Root seed; every stage derives from it.
    #[serde(default)]
    pub seed: u64,
    /// Train utterances per command.
    #[serde(default = "default_train_size")]
    pub train_size: usize,
    /// Validation utterances per command.
    #[serde(default = "default_eval_size")]
    pub validation_size: usize,
    /// Test utterances per command.
    #[serde(default = "default_eval_size")]
    pub test_size: usize,
    /// Renders per out-of-domain text.
    #[serde(default = "default_one")]
    pub ood_repeat: usize,
    /// Simulator frames per character.
    #[serde(default = "default_frames_per_char")]
    pub frames_per_char: usize,
    /// Simulator blank insertion probability.
    #[serde(default = "default_blank_insert_prob")]
    pub blank_insert_prob: f64,
    /// Simulator peak probability.
    #[serde(default = "default_peak_prob")]
    pub peak_prob: f64,
    /// Simulator noise temperature.
    #[serde(default = "default_noise_temperature")]
    pub noise_temperature: f64,

    /// Minimum observations for a dictionary variant.
    #[serde(default = "default_one_u64")]
    pub min_count: u64,

    /// Fixed per-word variant count (exclusive with coverage).
    #[serde(default)]
    pub candidate_k: Option<usize>,
    /// Per-word coverage target in (0, 1] (exclusive with k).
    #[serde(default)]
    pub candidate_coverage: Option<f64>,
    /// Candidate-set size sweep; empty runs once uncapped.
    #[serde(default)]
    pub candidate_caps: Vec<usize>,

    /// False-alarm rate target α.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Misdetection weight β.
    #[serde(default = "default_beta")]
    pub beta: f64,

    /// Algorithms to run (greedy, refined, beam, cem, exhaustive).
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    /// Beam width.
    #[serde(default = "default_beam_width")]
    pub beam_width: usize,
    /// CEM population size.
    #[serde(default = "default_cem_population")]
    pub cem_population: usize,
    /// CEM elite fraction.
    #[serde(default = "default_cem_elite_fraction")]
    pub cem_elite_fraction: f64,
    /// CEM iteration count.
    #[serde(default = "default_cem_iterations")]
    pub cem_iterations: usize,
    /// CEM smoothing toward new elite statistics.
    #[serde(default = "default_cem_smoothing")]
    pub cem_smoothing: f64,
    /// Optional evaluation budget per search.
    #[serde(default)]
    pub eval_budget: Option<u64>,
}

fn default_train_size() -> usize {
    100
}
fn default_eval_size() -> usize {
    50
}
fn default_one() -> usize {
    1
}
fn default_one_u64() -> u64 {
    1
}
fn default_frames_per_char() -> usize {
    3
}
fn default_blank_insert_prob() -> f64 {
    0.2
}
fn default_peak_prob() -> f64 {
    0.85
}
fn default_noise_temperature() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.001
}
fn default_beta() -> f64 {
    1.0
}
fn default_algorithms() -> Vec<String> {
    ["greedy", "refined", "beam", "cem"].map(String::from).to_vec()
}
fn default_beam_width() -> usize {
    5
}
fn default_cem_population() -> usize {
    100
}
fn default_cem_elite_fraction() -> f64 {
    0.1
}
fn default_cem_iterations() -> usize {
    50
}
fn default_cem_smoothing() -> f64 {
    0.7
}

impl PipelineConfig {
    /// Parses a TOML config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let config: Self =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Structural checks independent of the filesystem.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha {} must be in (0, 1)", self.alpha);
        }
        match (self.candidate_k, self.candidate_coverage) {
            (Some(_), Some(_)) => bail!("set candidate_k or candidate_coverage, not both"),
            (None, None) => bail!("one of candidate_k or candidate_coverage is required"),
            _ => {}
        }
        if self.algorithms.is_empty() {
            bail!("at least one algorithm is required");
        }
        for name in &self.algorithms {
            Algorithm::parse(name)?;
        }
        Ok(())
    }

    fn policy(&self) -> VariantPolicy {
        match (self.candidate_k, self.candidate_coverage) {
            (Some(k), _) => VariantPolicy::TopK(k),
            (_, Some(target)) => VariantPolicy::Coverage(target),
            _ => unreachable!("validated"),
        }
    }

    fn sim_config(&self) -> SimConfig {
        SimConfig {
            frames_per_char: self.frames_per_char,
            blank_insert_prob: self.blank_insert_prob,
            peak_prob: self.peak_prob,
            noise_temperature: self.noise_temperature,
            rng_seed: self.seed,
        }
    }

    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            alpha: self.alpha,
            beta: self.beta,
            beam_width: self.beam_width,
            cem_population: self.cem_population,
            cem_elite_fraction: self.cem_elite_fraction,
            cem_iterations: self.cem_iterations,
            cem_smoothing: self.cem_smoothing,
            rng_seed: self.seed,
            eval_budget: self.eval_budget,
            ..SearchConfig::default()
        }
    }
}

/// Whether a stage ran or reused its cached outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StageStatus {
    /// Outputs were rebuilt.
    Ran,
    /// Inputs unchanged and outputs present; nothing to do.
    Skipped,
}

/// The outcome of one pipeline invocation.
#[derive(Debug)]
pub struct PipelineOutcome {
    /// Stage name → status, in execution order.
    pub stages: Vec<(String, StageStatus)>,
    /// The report structure that was written.
    pub report: Report,
    /// Where the report JSON landed.
    pub report_path: PathBuf,
    /// The emitted CSV files.
    pub csv_paths: Vec<PathBuf>,
}

/// Split metrics plus the derived success rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metrics {
    /// Confidence threshold.
    pub tau: f64,
    /// False-alarm rate (strictly below α).
    pub far: f64,
    /// Misdetection rate.
    pub mdr: f64,
    /// Misclassification rate.
    pub mcr: f64,
    /// `mcr + β·mdr`.
    pub objective: f64,
    /// `1 − mdr − mcr`.
    pub success: f64,
}

impl Metrics {
    fn from_eval(result: &EvalResult) -> Self {
        Self {
            tau: result.tau,
            far: result.far,
            mdr: result.mdr,
            mcr: result.mcr,
            objective: result.objective,
            success: 1.0 - result.mdr - result.mcr,
        }
    }
}

/// One grammar's report row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    /// Algorithm name, or `baseline` / `all-candidates`.
    pub grammar: String,
    /// Objective evaluations the search consumed (0 for reference rows).
    pub evaluations: u64,
    /// Selected candidate count.
    pub selected_count: usize,
    /// Metrics on the train split.
    pub train: Metrics,
    /// Metrics on the validation split.
    pub validation: Metrics,
    /// Metrics on the test split.
    pub test: Metrics,
    /// The grammar as a bitstring over candidate indices.
    pub mask_bitstring: String,
}

/// Report block for one candidate-set size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    /// Requested cap (absent for the uncapped run).
    pub cap: Option<usize>,
    /// Actual candidate count |G|.
    pub candidate_set_size: usize,
    /// Baseline, all-candidates, and per-algorithm rows.
    pub rows: Vec<ReportRow>,
    /// Algorithm whose grammar won on validation objective.
    pub selected_algorithm: String,
}

/// The full pipeline report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    /// The exact configuration (and seed) that produced this report.
    pub config: PipelineConfig,
    /// One block per candidate-set size in the sweep.
    pub sweep: Vec<SweepReport>,
}

fn sha_hex(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

struct Stager {
    stamps_dir: PathBuf,
    stages: Vec<(String, StageStatus)>,
}

impl Stager {
    fn new(out_dir: &Path) -> Result<Self> {
        let stamps_dir = out_dir.join("stamps");
        std::fs::create_dir_all(&stamps_dir)?;
        Ok(Self {
            stamps_dir,
            stages: Vec::new(),
        })
    }

    /// Runs `build` unless the stamp matches `input_hash`, every output
    /// exists, and no upstream stage ran in this invocation. Returns
    /// whether the stage ran, for downstream dependency propagation.
    fn stage(
        &mut self,
        name: &str,
        input_hash: &str,
        outputs: &[&Path],
        deps_ran: bool,
        build: impl FnOnce() -> Result<()>,
    ) -> Result<bool> {
        let stamp = self.stamps_dir.join(format!("{name}.sha256"));
        let cached = std::fs::read_to_string(&stamp)
            .map(|s| s.trim() == input_hash)
            .unwrap_or(false);
        if !deps_ran && cached && outputs.iter().all(|p| p.exists()) {
            log::info!("stage {name}: up to date");
            self.stages.push((name.to_string(), StageStatus::Skipped));
            return Ok(false);
        }
        log::info!("stage {name}: running");
        // Drop a stale stamp so an aborted build forces a rerun.
        let _ = std::fs::remove_file(&stamp);
        build().with_context(|| format!("stage {name}"))?;
        std::fs::write(&stamp, format!("{input_hash}\n"))?;
        self.stages.push((name.to_string(), StageStatus::Ran));
        Ok(true)
    }
}

fn resolve(base: &Path, raw: &str) -> PathBuf {
    let path = Path::new(raw);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn cap_label(cap: Option<usize>) -> String {
    match cap {
        Some(cap) => cap.to_string(),
        None => "all".to_string(),
    }
}

/// Runs the pipeline described by a config file.
pub fn run_pipeline(config_path: &Path) -> Result<PipelineOutcome> {
    let config = PipelineConfig::load(config_path)?;
    let base = config_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();

    let commands_path = resolve(&base, &config.commands_file);
    let confusions_path = resolve(&base, &config.confusions_file);
    let ood_path = resolve(&base, &config.ood_file);
    let out_dir = resolve(&base, &config.out_dir);
    std::fs::create_dir_all(&out_dir)?;

    let alphabet = Alphabet::standard();
    let commands_bytes = std::fs::read(&commands_path)
        .with_context(|| format!("reading {}", commands_path.display()))?;
    let confusions_bytes = std::fs::read(&confusions_path)
        .with_context(|| format!("reading {}", confusions_path.display()))?;
    let ood_bytes =
        std::fs::read(&ood_path).with_context(|| format!("reading {}", ood_path.display()))?;

    let mut stager = Stager::new(&out_dir)?;

    // Stage: simulate.
    let bench_dir = out_dir.join("bench");
    let bench = BenchmarkPaths::under(&bench_dir);
    let sim_params = serde_json::to_vec(&(
        config.seed,
        config.train_size,
        config.validation_size,
        config.test_size,
        config.ood_repeat,
        config.frames_per_char,
        config.blank_insert_prob,
        config.peak_prob,
        config.noise_temperature,
    ))?;
    let simulate_hash = sha_hex(&[b"simulate-v1", &sim_params, &commands_bytes, &confusions_bytes, &ood_bytes]);
    let simulate_ran = {
        let outputs: Vec<&Path> = vec![
            bench.train(),
            bench.validation(),
            bench.test(),
            &bench.ood_manifest,
        ];
        let commands = commands_fmt::read_commands(&commands_path)?;
        let table = confusions::read_confusions(&confusions_path)?;
        let ood_texts: Vec<String> = String::from_utf8_lossy(&ood_bytes)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        let sim = config.sim_config();
        let sizes = SplitSizes {
            train: config.train_size,
            validation: config.validation_size,
            test: config.test_size,
        };
        let alphabet = &alphabet;
        stager.stage("simulate", &simulate_hash, &outputs, false, || {
            make_benchmark(
                &bench_dir,
                &commands,
                &table,
                &sim,
                sizes,
                &ood_texts,
                config.ood_repeat,
                alphabet,
            )?;
            Ok(())
        })?
    };

    // Stage: build-dict (over the train split).
    let dict_path = out_dir.join("dict.tsv");
    let dict_hash = sha_hex(&[
        b"build-dict-v1",
        simulate_hash.as_bytes(),
        &config.min_count.to_le_bytes(),
    ]);
    let dict_ran = {
        let train = bench.train().to_path_buf();
        let dict_path = dict_path.clone();
        let alphabet = &alphabet;
        let min_count = config.min_count;
        stager.stage(
            "build-dict",
            &dict_hash,
            &[&dict_path.clone()],
            simulate_ran,
            move || {
                let stats = ops::build_dict(&train, &dict_path, min_count, alphabet, None)?;
                log::info!(
                    "dictionary: {} words from {} utterances ({} skipped)",
                    stats.words,
                    stats.utterances,
                    stats.skipped
                );
                Ok(())
            },
        )?
    };

    // Per-cap stages: gen-candidates, score, searches.
    let caps: Vec<Option<usize>> = if config.candidate_caps.is_empty() {
        vec![None]
    } else {
        config.candidate_caps.iter().copied().map(Some).collect()
    };
    let policy_bytes = serde_json::to_vec(&(config.candidate_k, config.candidate_coverage))?;

    let algorithms: Vec<Algorithm> = config
        .algorithms
        .iter()
        .map(|name| Algorithm::parse(name))
        .collect::<Result<_>>()?;

    let mut sweep = Vec::new();
    for &cap in &caps {
        let label = cap_label(cap);
        let candidates_path = out_dir.join(format!("candidates_{label}.json"));
        let cand_hash = sha_hex(&[
            b"gen-candidates-v1",
            dict_hash.as_bytes(),
            &policy_bytes,
            format!("{cap:?}").as_bytes(),
        ]);
        let candidates_ran = {
            let commands_path = commands_path.clone();
            let dict_path = dict_path.clone();
            let out = candidates_path.clone();
            let policy = config.policy();
            let log_label = label.clone();
            stager.stage(
                &format!("gen-candidates[{label}]"),
                &cand_hash,
                &[&candidates_path.clone()],
                dict_ran,
                move || {
                    let size = ops::gen_candidates(&commands_path, &dict_path, policy, cap, &out)?;
                    log::info!("candidate set [{log_label}]: {size} grammars");
                    Ok(())
                },
            )?
        };

        let scores_path = out_dir.join(format!("scores_{label}.scmx"));
        let score_hash = sha_hex(&[b"score-v1", simulate_hash.as_bytes(), cand_hash.as_bytes()]);
        let score_ran = {
            let candidates_path = candidates_path.clone();
            let out = scores_path.clone();
            let manifests = vec![
                bench.train().to_path_buf(),
                bench.validation().to_path_buf(),
                bench.test().to_path_buf(),
            ];
            let ood_manifest = bench.ood_manifest.clone();
            let alphabet = &alphabet;
            let meta = scmx::meta_path(&scores_path);
            let log_label = label.clone();
            stager.stage(
                &format!("score[{label}]"),
                &score_hash,
                &[&scores_path.clone(), &meta],
                simulate_ran || candidates_ran,
                move || {
                    let (rows, cols) = ops::score(
                        &candidates_path,
                        &manifests,
                        &ood_manifest,
                        &out,
                        alphabet,
                    )?;
                    log::info!("score matrix [{log_label}]: {rows} x {cols}");
                    Ok(())
                },
            )?
        };

        let search_cfg = config.search_config();
        let search_cfg_bytes = serde_json::to_vec(&search_cfg)?;
        let mut summaries: Vec<(Algorithm, PathBuf)> = Vec::new();
        for &algorithm in &algorithms {
            let prefix = out_dir.join(format!("search_{}_{label}", algorithm.name()));
            let search_hash = sha_hex(&[
                b"search-v1",
                score_hash.as_bytes(),
                algorithm.name().as_bytes(),
                &search_cfg_bytes,
            ]);
            {
                let scores_path = scores_path.clone();
                let prefix_clone = prefix.clone();
                let cfg = search_cfg.clone();
                let outputs = [
                    ops::mask_path(&prefix),
                    ops::result_path(&prefix),
                    ops::trace_path(&prefix),
                ];
                let output_refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
                let log_label = label.clone();
                stager.stage(
                    &format!("search[{}:{label}]", algorithm.name()),
                    &search_hash,
                    &output_refs,
                    score_ran,
                    move || {
                        let summary =
                            ops::search(&scores_path, algorithm, &cfg, Some("train-"), &prefix_clone)?;
                        log::info!(
                            "search {} [{log_label}]: objective {:.4} after {} evaluations",
                            algorithm.name(),
                            summary.result.objective,
                            summary.evaluations
                        );
                        Ok(())
                    },
                )?;
            }
            summaries.push((algorithm, prefix));
        }

        sweep.push(assemble_sweep_report(
            &config,
            cap,
            &scores_path,
            &summaries,
        )?);
    }

    // The report stage is cheap and always rebuilt from the artifacts.
    let report = Report {
        config: config.clone(),
        sweep,
    };
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)
        .with_context(|| format!("writing {}", report_path.display()))?;
    stager
        .stages
        .push(("report".to_string(), StageStatus::Ran));

    let csv_paths = emit_plots_csv(&report, &out_dir)?;

    Ok(PipelineOutcome {
        stages: stager.stages,
        report,
        report_path,
        csv_paths,
    })
}

fn assemble_sweep_report(
    config: &PipelineConfig,
    cap: Option<usize>,
    scores_path: &Path,
    searches: &[(Algorithm, PathBuf)],
) -> Result<SweepReport> {
    let matrix = scmx::read_score_matrix(scores_path)?;
    let splits = [Some("train-"), Some("validation-"), Some("test-")];

    let metrics_for = |sel: &GrammarSelection| -> Result<[Metrics; 3]> {
        let mut out = Vec::with_capacity(3);
        for prefix in splits {
            let result = ops::evaluate_selection(&matrix, sel, config.alpha, config.beta, prefix)?;
            out.push(Metrics::from_eval(&result));
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    };

    let mut rows = Vec::new();
    for (name, sel) in [
        ("baseline", GrammarSelection::originals(&matrix)),
        ("all-candidates", GrammarSelection::all(&matrix)),
    ] {
        let [train, validation, test] = metrics_for(&sel)?;
        rows.push(ReportRow {
            grammar: name.to_string(),
            evaluations: 0,
            selected_count: sel.count_selected(),
            train,
            validation,
            test,
            mask_bitstring: sel.to_bitstring(),
        });
    }

    for (algorithm, prefix) in searches {
        let summary_text = std::fs::read_to_string(ops::result_path(prefix))?;
        let summary: SearchSummary = serde_json::from_str(&summary_text)
            .with_context(|| format!("parsing {}", ops::result_path(prefix).display()))?;
        let bits = mask::parse_mask(&summary.mask_bitstring, matrix.num_candidates())?;
        let sel = GrammarSelection::from_bits(bits, &matrix)?;
        let [train, validation, test] = metrics_for(&sel)?;
        rows.push(ReportRow {
            grammar: algorithm.name().to_string(),
            evaluations: summary.evaluations,
            selected_count: sel.count_selected(),
            train,
            validation,
            test,
            mask_bitstring: summary.mask_bitstring,
        });
    }

    // Model selection on the validation split, never on test.
    let selected_algorithm = rows
        .iter()
        .skip(2)
        .min_by(|a, b| a.validation.objective.total_cmp(&b.validation.objective))
        .map(|r| r.grammar.clone())
        .unwrap_or_else(|| "baseline".to_string());

    Ok(SweepReport {
        cap,
        candidate_set_size: matrix.num_candidates(),
        rows,
        selected_algorithm,
    })
}

/// Writes the plot-ready CSV tables next to the report.
///
/// `success_by_size.csv` mirrors the success-rate table over candidate
/// set sizes, `error_decomposition.csv` the per-grammar MDR/MCR/success
/// split, and `evaluations_trace.csv` the objective-vs-evaluations
/// curves from the persisted search traces.
pub fn emit_plots_csv(report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let success_path = out_dir.join("success_by_size.csv");
    {
        let mut w = csv::Writer::from_path(&success_path)?;
        w.write_record(["candidate_set_size", "grammar", "test_success_percent"])?;
        for block in &report.sweep {
            for row in &block.rows {
                w.write_record([
                    block.candidate_set_size.to_string(),
                    row.grammar.clone(),
                    format!("{:.2}", row.test.success * 100.0),
                ])?;
            }
        }
        w.flush()?;
    }
    written.push(success_path);

    let decomposition_path = out_dir.join("error_decomposition.csv");
    {
        let mut w = csv::Writer::from_path(&decomposition_path)?;
        w.write_record(["candidate_set_size", "grammar", "mdr", "mcr", "success"])?;
        for block in &report.sweep {
            for row in &block.rows {
                w.write_record([
                    block.candidate_set_size.to_string(),
                    row.grammar.clone(),
                    row.test.mdr.to_string(),
                    row.test.mcr.to_string(),
                    row.test.success.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    written.push(decomposition_path);

    let trace_merge_path = out_dir.join("evaluations_trace.csv");
    {
        let mut w = csv::Writer::from_path(&trace_merge_path)?;
        w.write_record([
            "candidate_set_size",
            "algorithm",
            "evaluations",
            "best_objective",
        ])?;
        for block in &report.sweep {
            let label = cap_label(block.cap);
            for row in &block.rows {
                if row.grammar == "baseline" || row.grammar == "all-candidates" {
                    continue;
                }
                let prefix = out_dir.join(format!("search_{}_{label}", row.grammar));
                let trace = ops::trace_path(&prefix);
                let mut r = csv::Reader::from_path(&trace)
                    .with_context(|| format!("opening {}", trace.display()))?;
                for record in r.records() {
                    let record = record?;
                    w.write_record([
                        block.candidate_set_size.to_string(),
                        row.grammar.clone(),
                        record[0].to_string(),
                        record[1].to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
    }
    written.push(trace_merge_path);

    Ok(written)
}
