//! Batch evaluation of engine rankings against human study data.
//!
//! Every (subject, question) pair is independent, so the map step runs
//! data-parallel under the `parallel` feature (rayon) and sequentially
//! otherwise; aggregation always happens in a fixed order (ascending
//! subject id, then scenario id), so both paths produce identical reports.
//! The `*_sequential` entry points stay available for benchmarking the two
//! paths against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CorpusFile, StudyFile};
use crate::error::{Error, Result};
use crate::metrics::{first_acc, mean_os_sim, os_sim, sample_std, RankingPair};
use crate::ranking::{rank, Backend, RankingResult};
use crate::values::{PreferenceProfile, ScoringConfig};

/// How to score and rank during an evaluation run.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub config: ScoringConfig,
    pub backend: Backend,
}

/// One evaluated (subject, question) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub subject_id: String,
    pub scenario_id: String,
    pub os_sim: f64,
    pub first_hit: bool,
}

/// Per-subject aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub subject_id: String,
    pub question_count: usize,
    pub mean_os_sim: f64,
    pub first_acc: f64,
}

/// Aggregate similarity of engine rankings to the study's references.
///
/// The per-question mean is the headline; the per-subject grouping is also
/// reported because the two averaging hierarchies differ in general.
/// Spreads are sample standard deviations (the interval type behind
/// published "±" margins is not standardized, so ours is labeled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub backend: String,
    pub variant: String,
    pub pair_count: usize,
    pub subject_count: usize,
    /// Mean OS-Sim over all (subject, question) pairs.
    pub mean_os_sim_by_question: f64,
    /// Sample standard deviation of per-question OS-Sim values.
    pub os_sim_sample_std: f64,
    /// Mean over subjects of each subject's mean OS-Sim.
    pub mean_os_sim_by_subject: f64,
    /// Fraction of pairs whose top action matches the reference.
    pub first_acc: f64,
    pub subjects: Vec<SubjectSummary>,
    pub questions: Vec<QuestionResult>,
}

fn evaluate_one(
    corpus: &CorpusFile,
    subject_id: &str,
    preferences: &PreferenceProfile,
    scenario_id: &str,
    reference: &[String],
    options: &EvalOptions,
) -> Result<QuestionResult> {
    let scenario = corpus.scenario(scenario_id).ok_or_else(|| {
        Error::Config(format!("scenario \"{scenario_id}\" missing from corpus"))
    })?;
    let ranking = rank(scenario, preferences, &options.config, options.backend)?;
    let predicted: Vec<String> = ranking
        .order
        .iter()
        .map(|&i| scenario.actions[i].id.clone())
        .collect();
    let pair = RankingPair::new(predicted, reference.to_vec())?;
    Ok(QuestionResult {
        subject_id: subject_id.to_string(),
        scenario_id: scenario_id.to_string(),
        os_sim: os_sim(&pair),
        first_hit: pair.predicted()[0] == pair.reference()[0],
    })
}

type Task<'a> = (&'a str, PreferenceProfile, &'a str, &'a [String]);

fn collect_tasks<'a>(
    study: &'a StudyFile,
    options: &EvalOptions,
) -> Result<Vec<Task<'a>>> {
    let mut subjects: Vec<_> = study.subjects.iter().collect();
    subjects.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    let mut tasks = Vec::new();
    for record in subjects {
        let profile =
            PreferenceProfile::new(record.preferences.clone(), options.config.steepness)?;
        // BTreeMap iteration is already ascending by scenario id.
        for (scenario_id, reference) in &record.rankings {
            tasks.push((
                record.subject_id.as_str(),
                profile.clone(),
                scenario_id.as_str(),
                reference.as_slice(),
            ));
        }
    }
    Ok(tasks)
}

fn run_tasks(
    corpus: &CorpusFile,
    tasks: &[Task<'_>],
    options: &EvalOptions,
    parallel: bool,
) -> Result<Vec<QuestionResult>> {
    let eval = |(subject_id, profile, scenario_id, reference): &Task<'_>| {
        evaluate_one(corpus, subject_id, profile, scenario_id, reference, options)
    };
    #[cfg(feature = "parallel")]
    if parallel {
        return tasks.par_iter().map(eval).collect();
    }
    let _ = parallel;
    tasks.iter().map(eval).collect()
}

fn build_report(
    questions: Vec<QuestionResult>,
    options: &EvalOptions,
    subject_count: usize,
) -> Result<EvaluationReport> {
    if questions.is_empty() {
        return Err(Error::EmptyMetric("evaluation"));
    }
    let os_values: Vec<f64> = questions.iter().map(|q| q.os_sim).collect();
    let mean_by_question = os_values.iter().sum::<f64>() / os_values.len() as f64;
    let first = questions.iter().filter(|q| q.first_hit).count() as f64
        / questions.len() as f64;

    let mut subjects: Vec<SubjectSummary> = Vec::new();
    for q in &questions {
        match subjects.last_mut() {
            Some(s) if s.subject_id == q.subject_id => {
                s.question_count += 1;
                s.mean_os_sim += q.os_sim;
                s.first_acc += q.first_hit as u8 as f64;
            }
            _ => subjects.push(SubjectSummary {
                subject_id: q.subject_id.clone(),
                question_count: 1,
                mean_os_sim: q.os_sim,
                first_acc: q.first_hit as u8 as f64,
            }),
        }
    }
    for s in &mut subjects {
        s.mean_os_sim /= s.question_count as f64;
        s.first_acc /= s.question_count as f64;
    }
    let mean_by_subject =
        subjects.iter().map(|s| s.mean_os_sim).sum::<f64>() / subjects.len() as f64;

    Ok(EvaluationReport {
        backend: options.backend.label().to_string(),
        variant: options.config.variant.label().to_string(),
        pair_count: questions.len(),
        subject_count,
        mean_os_sim_by_question: mean_by_question,
        os_sim_sample_std: sample_std(&os_values),
        mean_os_sim_by_subject: mean_by_subject,
        first_acc: first,
        subjects,
        questions,
    })
}

/// Evaluates every (subject, question) pair of a study against the corpus.
pub fn evaluate_study(
    corpus: &CorpusFile,
    study: &StudyFile,
    options: &EvalOptions,
) -> Result<EvaluationReport> {
    let tasks = collect_tasks(study, options)?;
    let questions = run_tasks(corpus, &tasks, options, true)?;
    build_report(questions, options, study.subjects.len())
}

/// Always-sequential twin of [`evaluate_study`], kept for benchmarking.
pub fn evaluate_study_sequential(
    corpus: &CorpusFile,
    study: &StudyFile,
    options: &EvalOptions,
) -> Result<EvaluationReport> {
    let tasks = collect_tasks(study, options)?;
    let questions = run_tasks(corpus, &tasks, options, false)?;
    build_report(questions, options, study.subjects.len())
}

/// Ranks every scenario of a corpus for one profile, in corpus order.
/// Parallel under the `parallel` feature.
pub fn rank_batch(
    corpus: &CorpusFile,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
    backend: Backend,
) -> Result<Vec<RankingResult>> {
    #[cfg(feature = "parallel")]
    {
        corpus
            .scenarios
            .par_iter()
            .map(|s| rank(s, profile, config, backend))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        rank_batch_sequential(corpus, profile, config, backend)
    }
}

/// Always-sequential twin of [`rank_batch`].
pub fn rank_batch_sequential(
    corpus: &CorpusFile,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
    backend: Backend,
) -> Result<Vec<RankingResult>> {
    corpus
        .scenarios
        .iter()
        .map(|s| rank(s, profile, config, backend))
        .collect()
}

/// Convenience: ranks and reuses [`mean_os_sim`]/[`first_acc`] on
/// already-built pairs. Used by comparison tables.
pub fn pairs_metrics(pairs: &[RankingPair]) -> Result<(f64, f64)> {
    Ok((mean_os_sim(pairs)?, first_acc(pairs)?))
}
