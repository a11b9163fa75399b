//! On-disk corpus and study formats, validation, statistics, and splits.
//!
//! Corpus files are JSON with a versioned header (`valuepilot-corpus/1`);
//! study files use `valuepilot-study/1`. Malformed files never partially
//! load: parsing and validation either yield a fully checked value or an
//! error enumerating every violation found.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationReport};
use crate::values::{AnnotatedScenario, DimensionSet, ValueVector};

pub const CORPUS_FORMAT_VERSION: &str = "valuepilot-corpus/1";
pub const STUDY_FORMAT_VERSION: &str = "valuepilot-study/1";

/// Number of histogram bins of width 0.1 covering `[-1, 1]`.
pub const SCORE_HISTOGRAM_BINS: usize = 20;

/// A validated corpus of annotated scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFile {
    pub version: String,
    pub dimensions: DimensionSet,
    pub scenarios: Vec<AnnotatedScenario>,
}

impl CorpusFile {
    pub fn new(dimensions: DimensionSet, scenarios: Vec<AnnotatedScenario>) -> Result<Self> {
        let corpus = Self {
            version: CORPUS_FORMAT_VERSION.to_string(),
            dimensions,
            scenarios,
        };
        corpus.validate().into_result(corpus)
    }

    /// Full structural validation; returns every violation, not just the first.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        if self.version != CORPUS_FORMAT_VERSION {
            report.push(
                "version",
                format!(
                    "expected \"{CORPUS_FORMAT_VERSION}\", got \"{}\"",
                    self.version
                ),
            );
        }
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (idx, scenario) in self.scenarios.iter().enumerate() {
            if let Some(&first) = seen.get(scenario.id.as_str()) {
                report.push(
                    format!("scenario \"{}\"", scenario.id),
                    format!("duplicate id (records {first} and {idx})"),
                );
            } else {
                seen.insert(&scenario.id, idx);
            }
            scenario.validate(&self.dimensions, &mut report);
        }
        report
    }

    pub fn scenario(&self, id: &str) -> Option<&AnnotatedScenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    pub fn action_count(&self) -> usize {
        self.scenarios.iter().map(|s| s.actions.len()).sum()
    }
}

/// Deterministic summary statistics over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub scenario_count: usize,
    pub action_count: usize,
    /// Per dimension: counts of entries `> 0`, `< 0`, and `== 0`, over both
    /// scenario and action relevance vectors.
    pub positive_counts: Vec<usize>,
    pub negative_counts: Vec<usize>,
    pub zero_counts: Vec<usize>,
    /// Width-0.1 bins over `[-1, 1]`; scores at a bin edge fall upward,
    /// except 1.0 which lands in the last bin.
    pub score_histogram: Vec<usize>,
    /// agent_count value -> number of scenarios.
    pub agent_count_histogram: BTreeMap<u32, usize>,
    /// actions-per-scenario -> number of scenarios.
    pub actions_per_scenario: BTreeMap<usize, usize>,
}

fn histogram_bin(score: f64) -> usize {
    let bin = ((score + 1.0) / 0.1).floor() as isize;
    bin.clamp(0, SCORE_HISTOGRAM_BINS as isize - 1) as usize
}

/// Computes [`CorpusStats`] in a single pass.
pub fn corpus_stats(corpus: &CorpusFile) -> CorpusStats {
    let m = corpus.dimensions.len();
    let mut stats = CorpusStats {
        scenario_count: corpus.scenarios.len(),
        action_count: corpus.action_count(),
        positive_counts: vec![0; m],
        negative_counts: vec![0; m],
        zero_counts: vec![0; m],
        score_histogram: vec![0; SCORE_HISTOGRAM_BINS],
        agent_count_histogram: BTreeMap::new(),
        actions_per_scenario: BTreeMap::new(),
    };
    let tally = |entries: &[f64], stats: &mut CorpusStats| {
        for (j, &x) in entries.iter().enumerate() {
            if x > 0.0 {
                stats.positive_counts[j] += 1;
            } else if x < 0.0 {
                stats.negative_counts[j] += 1;
            } else {
                stats.zero_counts[j] += 1;
            }
            stats.score_histogram[histogram_bin(x)] += 1;
        }
    };
    for scenario in &corpus.scenarios {
        tally(scenario.relevance.entries(), &mut stats);
        for action in &scenario.actions {
            tally(action.relevance.entries(), &mut stats);
        }
        if let Some(ac) = scenario.agent_count {
            *stats.agent_count_histogram.entry(ac).or_insert(0) += 1;
        }
        *stats
            .actions_per_scenario
            .entry(scenario.actions.len())
            .or_insert(0) += 1;
    }
    stats
}

/// Result of an 80/20-style corpus split.
#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub train: CorpusFile,
    pub test: CorpusFile,
    /// Set when one side came out empty.
    pub warning: Option<String>,
}

/// Seeded shuffle of scenarios, split at `floor(ratio * N)`.
///
/// Splitting is always by scenario so a scenario's actions never straddle
/// the two sides.
pub fn split_corpus(corpus: &CorpusFile, ratio: f64, seed: u64) -> Result<CorpusSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::out_of_range("split ratio", ratio, 0.0, 1.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = corpus.scenarios.clone();
    shuffled.shuffle(&mut rng);
    let cut = (ratio * shuffled.len() as f64).floor() as usize;
    let (train_s, test_s) = shuffled.split_at(cut);
    let warning = if train_s.is_empty() || test_s.is_empty() {
        Some(format!(
            "degenerate split: train={} test={}",
            train_s.len(),
            test_s.len()
        ))
    } else {
        None
    };
    let make = |scenarios: &[AnnotatedScenario]| CorpusFile {
        version: corpus.version.clone(),
        dimensions: corpus.dimensions.clone(),
        scenarios: scenarios.to_vec(),
    };
    Ok(CorpusSplit {
        train: make(train_s),
        test: make(test_s),
        warning,
    })
}

/// One study subject: preference weights plus reference rankings keyed by
/// scenario id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub subject_id: String,
    pub preferences: ValueVector,
    /// scenario id -> that subject's reference ordering of its action ids.
    pub rankings: BTreeMap<String, Vec<String>>,
}

/// The on-disk study file shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyFile {
    pub version: String,
    pub subjects: Vec<StudyRecord>,
}

impl StudyFile {
    /// Validates the study against its companion corpus.
    pub fn validate(&self, corpus: &CorpusFile) -> ValidationReport {
        let mut report = ValidationReport::new();
        if self.version != STUDY_FORMAT_VERSION {
            report.push(
                "version",
                format!(
                    "expected \"{STUDY_FORMAT_VERSION}\", got \"{}\"",
                    self.version
                ),
            );
        }
        let mut seen: HashSet<&str> = HashSet::new();
        for record in &self.subjects {
            let loc = format!("subject \"{}\"", record.subject_id);
            if !seen.insert(&record.subject_id) {
                report.push(&loc, "duplicate subject id");
            }
            if record.preferences.len() != corpus.dimensions.len() {
                report.push(
                    &loc,
                    format!(
                        "{} preference entries, expected {}",
                        record.preferences.len(),
                        corpus.dimensions.len()
                    ),
                );
            }
            for (j, &p) in record.preferences.entries().iter().enumerate() {
                if !(p >= 0.0 && p <= 1.0) {
                    report.push(&loc, format!("preference entry {j} = {p} outside [0, 1]"));
                }
            }
            for (scenario_id, ranking) in &record.rankings {
                let rloc = format!("{loc} / scenario \"{scenario_id}\"");
                match corpus.scenario(scenario_id) {
                    None => report.push(&rloc, "references a scenario missing from the corpus"),
                    Some(scenario) => {
                        let expected: HashSet<&str> =
                            scenario.actions.iter().map(|a| a.id.as_str()).collect();
                        let got: HashSet<&str> = ranking.iter().map(String::as_str).collect();
                        if got.len() != ranking.len() {
                            report.push(&rloc, "ranking repeats an action id");
                        }
                        if got != expected {
                            report.push(
                                &rloc,
                                "ranking is not a permutation of the scenario's action ids",
                            );
                        }
                    }
                }
            }
        }
        report
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

/// Loads and fully validates a corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusFile> {
    let path = path.as_ref();
    let corpus: CorpusFile = parse_json(path, &read_to_string(path)?)?;
    corpus.validate().into_result(corpus)
}

/// Serializes a corpus as pretty-printed JSON.
pub fn write_corpus(corpus: &CorpusFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(corpus).expect("corpus serialization cannot fail");
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a study file and cross-validates it against a loaded corpus.
pub fn load_study(path: impl AsRef<Path>, corpus: &CorpusFile) -> Result<StudyFile> {
    let path = path.as_ref();
    let study: StudyFile = parse_json(path, &read_to_string(path)?)?;
    study.validate(corpus).into_result(study)
}

pub fn write_study(study: &StudyFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(study).expect("study serialization cannot fail");
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
