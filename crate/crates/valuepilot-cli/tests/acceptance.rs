//! End-to-end golden check: structured `rank` and `evaluate` reports on
//! the shipped fixture corpus must reproduce the committed golden files
//! byte-for-byte. The golden ranking itself is re-derived from the
//! loop-literal reference path so the files cannot drift silently.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use valuepilot::dataset::load_corpus;
use valuepilot::oracle::brute_force_rank;
use valuepilot::{PreferenceProfile, ScoringConfig, ValueVector};

fn run(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_valuepilot"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn golden(name: &str) -> Vec<u8> {
    std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

#[test]
fn criterion_11_cli_golden_reports() {
    let started = Instant::now();

    let rank_bytes = run(&[
        "rank", "fixtures/corpus.json", "s-weekend", "--format", "structured",
    ]);
    assert_eq!(
        rank_bytes,
        golden("golden_rank.json"),
        "structured rank output diverged from the committed golden"
    );

    // The golden order must equal the independent reference ranking.
    let manifest_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let corpus = load_corpus(manifest_dir.join("fixtures/corpus.json")).unwrap();
    let scenario = corpus.scenario("s-weekend").unwrap();
    let profile = PreferenceProfile::from_raw(ValueVector::filled(6, 0.5)).unwrap();
    let oracle = brute_force_rank(scenario, &profile, &ScoringConfig::default()).unwrap();
    let report: serde_json::Value = serde_json::from_slice(&rank_bytes).unwrap();
    let golden_ids: Vec<&str> = report["ranked_actions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["action_id"].as_str().unwrap())
        .collect();
    let oracle_ids: Vec<&str> = oracle
        .order
        .iter()
        .map(|&i| scenario.actions[i].id.as_str())
        .collect();
    assert_eq!(golden_ids, oracle_ids, "golden ranking disagrees with the reference path");

    let evaluate_bytes = run(&[
        "evaluate", "fixtures/corpus.json", "fixtures/study.json",
        "--ablations", "--format", "structured",
    ]);
    assert_eq!(
        evaluate_bytes,
        golden("golden_evaluate.json"),
        "structured evaluate output diverged from the committed golden"
    );

    println!(
        "PASS criterion 11: rank and evaluate reproduce committed goldens byte-for-byte in {:?}",
        started.elapsed()
    );
}
