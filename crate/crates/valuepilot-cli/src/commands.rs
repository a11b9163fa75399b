//! The five subcommands and their text/structured renderers.
//!
//! Structured output is deterministic: pretty-printed JSON with a fixed
//! field order and no timestamps, so golden files can compare
//! byte-for-byte. Text output is human-oriented and may carry a
//! timestamp, but only behind `--timestamps`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use valuepilot::assessor::{AssessorRequest, RemoteAssessor, ENV_ENDPOINT};
use valuepilot::dataset::{corpus_stats, load_corpus, load_study, CorpusFile, CorpusStats, StudyFile};
use valuepilot::eval::{evaluate_study, EvalOptions, EvaluationReport};
use valuepilot::ranking::FlowSummary;
use valuepilot::values::{
    ScoreTrace, DEFAULT_ACTION_WEIGHT, DEFAULT_SCENARIO_WEIGHT, DEFAULT_STEEPNESS,
};
use valuepilot::{
    rank, AnnotatedScenario, Backend, Error, PreferenceProfile, Result, ScoringConfig,
    ValidationReport, ValueVector, Variant,
};

use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; `structured` is the machine format used by golden tests.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Prepend a generation timestamp to text output.
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Ablation variant: full, only_action, no_preference, no_subjective, no_scenario.
    #[arg(long, default_value = "full")]
    pub variant: String,
    /// Ranking backend: promethee, maut, topsis, ahp.
    #[arg(long, default_value = "promethee")]
    pub backend: String,
    /// Preference preprocessing sigmoid steepness.
    #[arg(long, default_value_t = DEFAULT_STEEPNESS)]
    pub steepness: f64,
    /// Weight of the discrepancy term in the scenario blend.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_WEIGHT)]
    pub scenario_weight: f64,
    /// Weight of the discrepancy term in the action blend.
    #[arg(long, default_value_t = DEFAULT_ACTION_WEIGHT)]
    pub action_weight: f64,
}

impl ConfigArgs {
    fn build(&self) -> Result<(ScoringConfig, Backend)> {
        let config = ScoringConfig {
            scenario_weight: self.scenario_weight,
            action_weight: self.action_weight,
            steepness: self.steepness,
            variant: self.variant.parse()?,
        };
        config.validate()?;
        Ok((config, self.backend.parse()?))
    }
}

/// Rendered report plus the process exit code.
pub struct CmdOutput {
    pub text: String,
    pub exit: i32,
}

impl CmdOutput {
    fn ok(text: String) -> Self {
        Self { text, exit: 0 }
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn render<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail") + "\n"
}

fn timestamp_line(out: &OutputArgs) -> String {
    if out.timestamps && out.format == Format::Text {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("generated at unix {now}\n")
    } else {
        String::new()
    }
}

// ---------------------------------------------------------------------------
// rank

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Corpus file.
    pub corpus: PathBuf,
    /// Scenario id within the corpus.
    pub scenario: String,
    /// Comma-separated preference weights in `[0, 1]`, in corpus dimension
    /// order; defaults to uniform 0.5.
    #[arg(long)]
    pub prefs: Option<String>,
    /// Score via the remote assessor (VALUEPILOT_ASSESSOR_URL) instead of
    /// corpus annotations.
    #[arg(long)]
    pub remote: bool,
    /// Include the full scoring trace in the report.
    #[arg(long)]
    pub explain: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct RankedAction {
    rank: usize,
    action_id: String,
    score: f64,
}

#[derive(Debug, Serialize)]
struct RankReport {
    report_type: &'static str,
    manifest: RunManifest,
    scenario_id: String,
    preferences: Vec<f64>,
    ranked_actions: Vec<RankedAction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flows: Option<FlowSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consistency_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<ScoreTrace>,
}

fn parse_prefs(spec: Option<&str>, m: usize) -> Result<ValueVector> {
    let Some(spec) = spec else {
        return Ok(ValueVector::filled(m, 0.5));
    };
    let entries = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("preference `{t}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != m {
        return Err(Error::DimensionMismatch {
            location: "--prefs".into(),
            expected: m,
            actual: entries.len(),
        });
    }
    ValueVector::preference(entries)
}

fn assess_remote(scenario: &AnnotatedScenario, corpus: &CorpusFile) -> Result<AnnotatedScenario> {
    let remote = RemoteAssessor::from_env("")?;
    if remote.base_url.is_empty() {
        return Err(Error::Config(format!(
            "remote scoring requires {ENV_ENDPOINT} to be set"
        )));
    }
    let request = AssessorRequest {
        scenario_text: scenario.text.clone(),
        action_texts: scenario.actions.iter().map(|a| a.text.clone()).collect(),
        dimension_set: corpus.dimensions.clone(),
        scenario_id: Some(scenario.id.clone()),
    };
    let response = remote.roundtrip(&request)?;
    let mut scored = scenario.clone();
    scored.relevance = response.scenario_scores;
    for (action, scores) in scored.actions.iter_mut().zip(response.action_scores) {
        action.relevance = scores;
    }
    Ok(scored)
}

pub fn cmd_rank(args: &RankArgs) -> Result<CmdOutput> {
    let corpus = load_corpus(&args.corpus)?;
    let (config, backend) = args.config.build()?;
    let mut manifest = RunManifest::new("rank", config, backend.label().to_string());
    manifest.add_input(&args.corpus)?;

    let scenario = corpus.scenario(&args.scenario).ok_or_else(|| {
        Error::Config(format!(
            "scenario \"{}\" not found in {}",
            args.scenario,
            args.corpus.display()
        ))
    })?;
    let scenario = if args.remote {
        assess_remote(scenario, &corpus)?
    } else {
        scenario.clone()
    };

    let prefs = parse_prefs(args.prefs.as_deref(), corpus.dimensions.len())?;
    let profile = PreferenceProfile::new(prefs, config.steepness)?;
    let mut result = rank(&scenario, &profile, &config, backend)?;
    if !args.explain {
        result.trace = None;
    }

    let ranked_actions: Vec<RankedAction> = result
        .order
        .iter()
        .enumerate()
        .map(|(pos, &i)| RankedAction {
            rank: pos + 1,
            action_id: scenario.actions[i].id.clone(),
            score: result.scores[i],
        })
        .collect();
    let report = RankReport {
        report_type: "rank",
        manifest,
        scenario_id: scenario.id.clone(),
        preferences: profile.raw().entries().to_vec(),
        ranked_actions,
        flows: result.flows,
        convention_note: result.convention_note,
        consistency_warning: result.consistency_warning,
        trace: result.trace,
    };

    if args.out.format == Format::Structured {
        return Ok(CmdOutput::ok(render(&report)));
    }
    let mut text = timestamp_line(&args.out);
    writeln!(
        text,
        "ranking for scenario \"{}\" (backend {}, variant {})",
        report.scenario_id,
        report.manifest.backend,
        report.manifest.config.variant.label()
    )
    .unwrap();
    for a in &report.ranked_actions {
        writeln!(text, "  {}. {}  score {}", a.rank, a.action_id, fmt6(a.score)).unwrap();
    }
    if let Some(note) = &report.convention_note {
        writeln!(text, "note: {note}").unwrap();
    }
    if let Some(warning) = &report.consistency_warning {
        writeln!(text, "warning: {warning}").unwrap();
    }
    if let Some(trace) = &report.trace {
        write_trace(&mut text, trace, &corpus, &scenario, &profile);
    }
    Ok(CmdOutput::ok(text))
}

fn write_trace(
    text: &mut String,
    trace: &ScoreTrace,
    corpus: &CorpusFile,
    scenario: &AnnotatedScenario,
    profile: &PreferenceProfile,
) {
    let row = |values: &[f64]| {
        values
            .iter()
            .map(|&x| format!("{x:>9.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(text, "trace (variant {}):", trace.variant.label()).unwrap();
    writeln!(text, "  dimensions:           {}", corpus.dimensions.names().join(", ")).unwrap();
    writeln!(text, "  transformed prefs:    {}", row(profile.transformed())).unwrap();
    writeln!(text, "  scenario relevance:   {}", row(&trace.scenario_relevance)).unwrap();
    writeln!(text, "  scenario discrepancy: {}", row(&trace.scenario_discrepancy)).unwrap();
    writeln!(text, "  scenario blend:       {}", row(&trace.scenario_blend)).unwrap();
    for (i, action) in scenario.actions.iter().enumerate() {
        writeln!(text, "  action \"{}\":", action.id).unwrap();
        writeln!(text, "    relevance:      {}", row(&trace.action_relevance[i])).unwrap();
        writeln!(text, "    discrepancy:    {}", row(&trace.action_discrepancy[i])).unwrap();
        writeln!(text, "    blend:          {}", row(&trace.action_blend[i])).unwrap();
        writeln!(text, "    contextualized: {}", row(&trace.contextualized[i])).unwrap();
    }
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Corpus file.
    pub corpus: PathBuf,
    /// Study file to evaluate against.
    pub study: PathBuf,
    /// Also report every ablation variant.
    #[arg(long)]
    pub ablations: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct AblationRow {
    variant: String,
    mean_os_sim_by_question: f64,
    os_sim_sample_std: f64,
    mean_os_sim_by_subject: f64,
    first_acc: f64,
}

#[derive(Debug, Serialize)]
struct EvaluateReport {
    report_type: &'static str,
    manifest: RunManifest,
    report: EvaluationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    ablations: Option<Vec<AblationRow>>,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<CmdOutput> {
    let corpus = load_corpus(&args.corpus)?;
    let study = load_study(&args.study, &corpus)?;
    let (config, backend) = args.config.build()?;
    let mut manifest = RunManifest::new("evaluate", config, backend.label().to_string());
    manifest.add_input(&args.corpus)?;
    manifest.add_input(&args.study)?;

    let report = evaluate_study(&corpus, &study, &EvalOptions { config, backend })?;
    let ablations = if args.ablations {
        let mut rows = Vec::new();
        for variant in Variant::ALL {
            let options = EvalOptions {
                config: ScoringConfig { variant, ..config },
                backend,
            };
            let r = evaluate_study(&corpus, &study, &options)?;
            rows.push(AblationRow {
                variant: variant.label().to_string(),
                mean_os_sim_by_question: r.mean_os_sim_by_question,
                os_sim_sample_std: r.os_sim_sample_std,
                mean_os_sim_by_subject: r.mean_os_sim_by_subject,
                first_acc: r.first_acc,
            });
        }
        Some(rows)
    } else {
        None
    };
    let full = EvaluateReport {
        report_type: "evaluate",
        manifest,
        report,
        ablations,
    };

    if args.out.format == Format::Structured {
        return Ok(CmdOutput::ok(render(&full)));
    }
    let r = &full.report;
    let mut text = timestamp_line(&args.out);
    writeln!(
        text,
        "evaluation: {} subjects, {} pairs (backend {}, variant {})",
        r.subject_count, r.pair_count, r.backend, r.variant
    )
    .unwrap();
    writeln!(text, "mean OS-Sim by question (headline): {}", fmt6(r.mean_os_sim_by_question)).unwrap();
    writeln!(text, "OS-Sim spread (sample std dev):     {}", fmt6(r.os_sim_sample_std)).unwrap();
    writeln!(text, "mean OS-Sim by subject:             {}", fmt6(r.mean_os_sim_by_subject)).unwrap();
    writeln!(text, "First-Acc:                          {}", fmt6(r.first_acc)).unwrap();
    writeln!(text, "subject      pairs  mean OS-Sim  First-Acc").unwrap();
    for s in &r.subjects {
        writeln!(
            text,
            "{:<12} {:>5}  {:>11}  {:>9}",
            s.subject_id,
            s.question_count,
            fmt6(s.mean_os_sim),
            fmt6(s.first_acc)
        )
        .unwrap();
    }
    if let Some(rows) = &full.ablations {
        writeln!(text, "ablations:").unwrap();
        writeln!(
            text,
            "variant        OS-Sim (question)  sample std  OS-Sim (subject)  First-Acc"
        )
        .unwrap();
        for row in rows {
            writeln!(
                text,
                "{:<14} {:>17}  {:>10}  {:>16}  {:>9}",
                row.variant,
                fmt6(row.mean_os_sim_by_question),
                fmt6(row.os_sim_sample_std),
                fmt6(row.mean_os_sim_by_subject),
                fmt6(row.first_acc)
            )
            .unwrap();
        }
    }
    Ok(CmdOutput::ok(text))
}

// ---------------------------------------------------------------------------
// compare-mcda

#[derive(Debug, Args)]
pub struct CompareMcdaArgs {
    /// Corpus file.
    pub corpus: PathBuf,
    /// Study file to evaluate against.
    pub study: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct BackendRow {
    backend: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention_note: Option<String>,
    mean_os_sim_by_question: f64,
    os_sim_sample_std: f64,
    first_acc: f64,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    report_type: &'static str,
    manifest: RunManifest,
    backends: Vec<BackendRow>,
}

pub fn cmd_compare_mcda(args: &CompareMcdaArgs) -> Result<CmdOutput> {
    let corpus = load_corpus(&args.corpus)?;
    let study = load_study(&args.study, &corpus)?;
    let (config, _) = args.config.build()?;
    let mut manifest = RunManifest::new("compare-mcda", config, "all".to_string());
    manifest.add_input(&args.corpus)?;
    manifest.add_input(&args.study)?;

    let mut backends = Vec::new();
    for backend in Backend::ALL {
        let r = evaluate_study(&corpus, &study, &EvalOptions { config, backend })?;
        backends.push(BackendRow {
            backend: backend.label().to_string(),
            convention_note: backend.convention_note().map(String::from),
            mean_os_sim_by_question: r.mean_os_sim_by_question,
            os_sim_sample_std: r.os_sim_sample_std,
            first_acc: r.first_acc,
        });
    }
    let report = CompareReport {
        report_type: "compare-mcda",
        manifest,
        backends,
    };

    if args.out.format == Format::Structured {
        return Ok(CmdOutput::ok(render(&report)));
    }
    let mut text = timestamp_line(&args.out);
    writeln!(
        text,
        "backend comparison (variant {}):",
        report.manifest.config.variant.label()
    )
    .unwrap();
    writeln!(text, "backend    mean OS-Sim  sample std  First-Acc").unwrap();
    for row in &report.backends {
        writeln!(
            text,
            "{:<10} {:>11}  {:>10}  {:>9}",
            row.backend,
            fmt6(row.mean_os_sim_by_question),
            fmt6(row.os_sim_sample_std),
            fmt6(row.first_acc)
        )
        .unwrap();
    }
    for row in &report.backends {
        if let Some(note) = &row.convention_note {
            writeln!(text, "{}: {note}", row.backend).unwrap();
        }
    }
    Ok(CmdOutput::ok(text))
}

// ---------------------------------------------------------------------------
// validate

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Corpus file.
    pub corpus: PathBuf,
    /// Optional study file to cross-validate against the corpus.
    pub study: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct ViolationRow {
    location: String,
    message: String,
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    report_type: &'static str,
    manifest: RunManifest,
    violation_count: usize,
    violations: Vec<ViolationRow>,
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<CmdOutput> {
    let mut manifest = RunManifest::new(
        "validate",
        ScoringConfig::default(),
        Backend::default().label().to_string(),
    );
    manifest.add_input(&args.corpus)?;
    if let Some(study) = &args.study {
        manifest.add_input(study)?;
    }

    let mut all = ValidationReport::new();
    let corpus: CorpusFile = parse_file(&args.corpus)?;
    all.violations.extend(corpus.validate().violations);
    if let Some(study_path) = &args.study {
        let study: StudyFile = parse_file(study_path)?;
        all.violations.extend(study.validate(&corpus).violations);
    }

    let exit = if all.is_clean() { 0 } else { 1 };
    let report = ValidateReport {
        report_type: "validate",
        manifest,
        violation_count: all.len(),
        violations: all
            .violations
            .iter()
            .map(|v| ViolationRow {
                location: v.location.clone(),
                message: v.message.clone(),
            })
            .collect(),
    };

    if args.out.format == Format::Structured {
        return Ok(CmdOutput {
            text: render(&report),
            exit,
        });
    }
    let mut text = timestamp_line(&args.out);
    writeln!(text, "{} violation(s)", report.violation_count).unwrap();
    for v in &report.violations {
        writeln!(text, "  - {}: {}", v.location, v.message).unwrap();
    }
    Ok(CmdOutput { text, exit })
}

// ---------------------------------------------------------------------------
// stats

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus file.
    pub corpus: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct StatsReport {
    report_type: &'static str,
    manifest: RunManifest,
    dimensions: Vec<String>,
    stats: CorpusStats,
}

pub fn cmd_stats(args: &StatsArgs) -> Result<CmdOutput> {
    let corpus = load_corpus(&args.corpus)?;
    let mut manifest = RunManifest::new(
        "stats",
        ScoringConfig::default(),
        Backend::default().label().to_string(),
    );
    manifest.add_input(&args.corpus)?;
    let stats = corpus_stats(&corpus);
    let report = StatsReport {
        report_type: "stats",
        manifest,
        dimensions: corpus.dimensions.names().to_vec(),
        stats,
    };

    if args.out.format == Format::Structured {
        return Ok(CmdOutput::ok(render(&report)));
    }
    let s = &report.stats;
    let mut text = timestamp_line(&args.out);
    writeln!(text, "{} scenario(s), {} action(s)", s.scenario_count, s.action_count).unwrap();
    writeln!(text, "dimension     positive  negative  zero").unwrap();
    for (j, name) in report.dimensions.iter().enumerate() {
        writeln!(
            text,
            "{:<13} {:>8}  {:>8}  {:>4}",
            name, s.positive_counts[j], s.negative_counts[j], s.zero_counts[j]
        )
        .unwrap();
    }
    writeln!(text, "score histogram (20 bins over [-1, 1]):").unwrap();
    for (b, count) in s.score_histogram.iter().enumerate() {
        let lo = -1.0 + 0.1 * b as f64;
        writeln!(text, "  [{:>4.1}, {:>4.1}) {:>6}", lo, lo + 0.1, count).unwrap();
    }
    writeln!(text, "actions per scenario:").unwrap();
    for (k, count) in &s.actions_per_scenario {
        writeln!(text, "  {k} action(s): {count} scenario(s)").unwrap();
    }
    if !s.agent_count_histogram.is_empty() {
        writeln!(text, "agent counts:").unwrap();
        for (k, count) in &s.agent_count_histogram {
            writeln!(text, "  {k} agent(s): {count} scenario(s)").unwrap();
        }
    }
    Ok(CmdOutput::ok(text))
}
