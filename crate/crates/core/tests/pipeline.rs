//! In-memory pipeline runs on the simulator: dictionary recovery,
//! candidate construction, score-matrix behavior, and search end to end.

use gramaug_core::candgen::{generate_candidates, CommandSet, VariantPolicy};
use gramaug_core::eval::{decode, evaluate, precompute_scores, GrammarSelection, UtteranceInfo};
use gramaug_core::prondict::DictionaryBuilder;
use gramaug_core::search::{greedy_search, SearchConfig};
use gramaug_core::sim::{render_utterance, ConfusionTable, SimConfig};
use gramaug_core::{Alphabet, PronDictionary};

fn sim_config(seed: u64) -> SimConfig {
    SimConfig {
        frames_per_char: 3,
        blank_insert_prob: 0.2,
        peak_prob: 0.9,
        noise_temperature: 0.5,
        rng_seed: seed,
    }
}

#[test]
fn planted_confusions_recovered_within_tolerance() {
    let alphabet = Alphabet::standard();
    let table = ConfusionTable::new([
        (
            "pause".to_string(),
            vec![("pause".to_string(), 0.6), ("pose".to_string(), 0.4)],
        ),
        (
            "two".to_string(),
            vec![("two".to_string(), 0.45), ("to".to_string(), 0.55)],
        ),
    ])
    .unwrap();

    let mut builder = DictionaryBuilder::new(&alphabet);
    for i in 0..500u64 {
        let p = render_utterance(
            &format!("u{i}"),
            "pause two",
            &table,
            &sim_config(9000 + i),
            &alphabet,
        )
        .unwrap();
        builder.add_utterance(&p, "pause two").unwrap();
    }
    let dict = builder.build(1);

    let pose = dict.variant_frequency("pause", "pose").unwrap();
    assert!((pose - 0.4).abs() < 0.05, "pose frequency {pose}");
    let to = dict.variant_frequency("two", "to").unwrap();
    assert!((to - 0.55).abs() < 0.05, "to frequency {to}");

    // The rank order carries over: "two" is dominated by "to".
    assert_eq!(dict.top_k_variants("two", 1), ["to"]);

    // Coverage against hand-computed cumulative sums for the entry.
    let entry = dict.entry("two").unwrap();
    let mut cumulative = 0.0;
    let mut expected_k = entry.variants.len();
    for (i, v) in entry.variants.iter().enumerate() {
        cumulative += v.frequency;
        if cumulative >= 0.9 {
            expected_k = i + 1;
            break;
        }
    }
    assert_eq!(dict.coverage_k("two", 0.9), expected_k);
}

#[test]
fn five_command_set_expands_to_exactly_150_candidates() {
    let commands = CommandSet::new(
        [
            "play music",
            "stop music",
            "pause music",
            "previous song",
            "next song",
        ]
        .map(String::from),
    )
    .unwrap();

    // Five variants for every first word, six for the second, so each
    // command contributes 30 products: 150 in total.
    let five = |w: &str| -> (String, u64, Vec<(String, u64)>) {
        let vs = (0..5)
            .map(|i| (if i == 0 { w.to_string() } else { format!("{w}{i}") }, 10 - i as u64))
            .collect();
        (w.to_string(), 40, vs)
    };
    let six = |w: &str| -> (String, u64, Vec<(String, u64)>) {
        let vs = (0..6)
            .map(|i| (if i == 0 { w.to_string() } else { format!("{w}{i}") }, 12 - i as u64))
            .collect();
        (w.to_string(), 57, vs)
    };
    let dict = PronDictionary::from_counts([
        five("play"),
        five("stop"),
        five("pause"),
        five("previous"),
        five("next"),
        six("music"),
        six("song"),
    ])
    .unwrap();

    let set = generate_candidates(&commands, &dict, VariantPolicy::TopK(6), None).unwrap();
    assert_eq!(set.len(), 150);
    assert_eq!(set.original_indices().len(), 5);
    for &i in &set.original_indices() {
        assert!(set.get(i).unwrap().is_original);
    }
}

/// Rendering "pause music" as "pose music" and scoring: the planted
/// decoding's own text is the best-scoring candidate of its length, and
/// including it flips the utterance's outcome.
#[test]
fn planted_decoding_wins_its_column_and_flips_the_outcome() {
    let alphabet = Alphabet::standard();
    let commands =
        CommandSet::new(["pause music", "stop music"].map(String::from)).unwrap();
    let table = ConfusionTable::new([(
        "pause".to_string(),
        vec![("pose".to_string(), 1.0)],
    )])
    .unwrap();
    let dict = PronDictionary::from_counts([
        (
            "pause".to_string(),
            10,
            vec![("pose".to_string(), 9), ("pause".to_string(), 1)],
        ),
        ("music".to_string(), 10, vec![("music".to_string(), 10)]),
        ("stop".to_string(), 10, vec![("stop".to_string(), 10)]),
    ])
    .unwrap();
    let candidates = generate_candidates(&commands, &dict, VariantPolicy::TopK(2), None).unwrap();
    let pose_index = candidates
        .candidates()
        .iter()
        .find(|c| c.text == "pose music")
        .unwrap()
        .index;

    let mut utterances = Vec::new();
    for i in 0..6u64 {
        let p = render_utterance(
            &format!("in{i}"),
            "pause music",
            &table,
            &sim_config(70 + i),
            &alphabet,
        )
        .unwrap();
        utterances.push((UtteranceInfo::in_domain(format!("in{i}"), 0), p));
    }
    // Near-miss texts: close enough to the grammar to pin the threshold
    // above the corrupted in-domain renderings.
    for (i, text) in ["top music", "pause musi", "stob music"]
        .iter()
        .enumerate()
    {
        let p = render_utterance(
            &format!("ood{i}"),
            text,
            &ConfusionTable::identity(),
            &sim_config(700 + i as u64),
            &alphabet,
        )
        .unwrap();
        utterances.push((UtteranceInfo::out_of_domain(format!("ood{i}")), p));
    }

    let m = precompute_scores(&candidates, &utterances, &alphabet).unwrap();

    // Column argmax among equal-length candidates: the planted decoding
    // text wins every in-domain column it describes.
    let target_len = "pose music".len();
    for col in 0..6 {
        let best_same_length = (0..m.num_candidates())
            .filter(|&r| m.candidate(r).text.len() == target_len)
            .max_by(|&a, &b| m.score(a, col).total_cmp(&m.score(b, col)))
            .unwrap();
        assert_eq!(m.candidate(best_same_length).text, "pose music", "col {col}");
    }

    let alpha = 0.2;
    let with_pose = GrammarSelection::originals(&m).with_candidate(pose_index);
    let tau = gramaug_core::eval::calibrate_threshold(&m, &with_pose, alpha).unwrap();
    for col in 0..6 {
        assert_eq!(decode(&m, &with_pose, tau, col), Some(0), "col {col}");
    }
    let augmented = evaluate(&m, &with_pose, alpha, 1.0).unwrap();
    assert_eq!(augmented.objective, 0.0);

    // Without "pose music" every utterance is rejected or misread.
    let originals = GrammarSelection::originals(&m);
    let tau = gramaug_core::eval::calibrate_threshold(&m, &originals, alpha).unwrap();
    for col in 0..6 {
        assert_ne!(decode(&m, &originals, tau, col), Some(0), "col {col}");
    }
    let baseline = evaluate(&m, &originals, alpha, 1.0).unwrap();
    assert!(baseline.objective > augmented.objective);

    // Greedy finds the fix on its own, adding it first.
    let cfg = SearchConfig {
        alpha,
        ..SearchConfig::default()
    };
    let trace = greedy_search(&m, &cfg).unwrap();
    assert!(trace.final_selection.is_selected(pose_index));
    let first_improvement = trace
        .steps
        .iter()
        .find(|s| s.best_mask != originals)
        .expect("an improving step exists");
    assert!(first_improvement.best_mask.is_selected(pose_index));
    assert!(trace.final_result.objective <= baseline.objective);
}
