//! Domain types and the contextualized scoring pipeline.
//!
//! Scoring proceeds in four stages per value dimension: preference
//! preprocessing (a steep sigmoid that pushes distinct preferences toward
//! the extremes), discrepancy between a score's magnitude and the
//! transformed preference, a weighted blend of discrepancy and objective
//! score, and finally scenario scaling that multiplies each action score
//! by a sigmoid of the scenario's blended score magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationReport};

/// The six default value dimensions.
pub const DEFAULT_DIMENSIONS: [&str; 6] = [
    "curiosity",
    "energy",
    "security",
    "happiness",
    "intimacy",
    "fairness",
];

/// Default steepness of the preference preprocessing sigmoid.
pub const DEFAULT_STEEPNESS: f64 = 10.0;

/// Default subjective/objective blend weights for scenario and action scores.
pub const DEFAULT_SCENARIO_WEIGHT: f64 = 0.3;
pub const DEFAULT_ACTION_WEIGHT: f64 = 0.3;

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// An ordered, named set of value dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionSet {
    names: Vec<String>,
}

impl DimensionSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut report = ValidationReport::new();
        if names.is_empty() {
            report.push("dimensions", "at least one dimension is required");
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                report.push(format!("dimension {i}"), "name must be non-empty");
            }
            if names[..i].contains(name) {
                report.push(format!("dimension {i}"), format!("duplicate name `{name}`"));
            }
        }
        report.into_result(Self { names })
    }

    /// The paper-default six dimensions.
    pub fn default_six() -> Self {
        Self {
            names: DEFAULT_DIMENSIONS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }
}

/// A fixed-length vector of per-dimension scores.
///
/// The same container carries relevance scores (each in `[-1, 1]`) and raw
/// preferences (each in `[0, 1]`); the constructors enforce the range that
/// applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    /// Wraps entries without range validation. Finiteness is still required.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        for (j, &x) in entries.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::out_of_range(
                    format!("entry {j}"),
                    x,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                ));
            }
        }
        Ok(Self(entries))
    }

    /// A relevance vector: every entry must lie in `[-1, 1]`.
    pub fn relevance(entries: Vec<f64>) -> Result<Self> {
        check_range(&entries, -1.0, 1.0, "relevance")?;
        Ok(Self(entries))
    }

    /// A raw preference vector: every entry must lie in `[0, 1]`.
    pub fn preference(entries: Vec<f64>) -> Result<Self> {
        check_range(&entries, 0.0, 1.0, "preference")?;
        Ok(Self(entries))
    }

    /// Lenient constructor for noisy upstream scores: clamps into `[-1, 1]`.
    pub fn relevance_clamped(entries: Vec<f64>) -> Result<Self> {
        let clamped = entries
            .into_iter()
            .map(|x| if x.is_finite() { x.clamp(-1.0, 1.0) } else { 0.0 })
            .collect();
        Ok(Self(clamped))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn filled(m: usize, value: f64) -> Self {
        Self(vec![value; m])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn check_range(entries: &[f64], min: f64, max: f64, what: &str) -> Result<()> {
    for (j, &x) in entries.iter().enumerate() {
        if !(x >= min && x <= max) {
            return Err(Error::out_of_range(format!("{what} entry {j}"), x, min, max));
        }
    }
    Ok(())
}

/// An individual's dimension weights, raw and sigmoid-transformed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    raw: ValueVector,
    transformed: ValueVector,
    steepness: f64,
}

impl PreferenceProfile {
    pub fn new(raw: ValueVector, steepness: f64) -> Result<Self> {
        let transformed = preprocess_preferences(raw.entries(), steepness)?;
        Ok(Self {
            raw,
            transformed: ValueVector(transformed),
            steepness,
        })
    }

    /// Profile with the default steepness of 10.
    pub fn from_raw(raw: ValueVector) -> Result<Self> {
        Self::new(raw, DEFAULT_STEEPNESS)
    }

    pub fn raw(&self) -> &ValueVector {
        &self.raw
    }

    /// The transformed weights `p'`, each strictly in `(0, 1)`.
    pub fn transformed(&self) -> &[f64] {
        self.transformed.entries()
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

/// One candidate action and its per-dimension relevance scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedAction {
    pub id: String,
    #[serde(default)]
    pub text: String,
    pub relevance: ValueVector,
}

/// A scenario, its relevance scores, and its candidate actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedScenario {
    pub id: String,
    #[serde(default)]
    pub text: String,
    pub relevance: ValueVector,
    pub actions: Vec<AnnotatedAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_count: Option<u32>,
    /// Free-form origin note carried through from corpus files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl AnnotatedScenario {
    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// Structural validation against a dimension set; collects every problem.
    pub fn validate(&self, dims: &DimensionSet, report: &mut ValidationReport) {
        let loc = format!("scenario \"{}\"", self.id);
        if self.actions.is_empty() {
            report.push(&loc, "must contain at least one action");
        }
        if self.relevance.len() != dims.len() {
            report.push(
                &loc,
                format!(
                    "relevance has {} entries, expected {}",
                    self.relevance.len(),
                    dims.len()
                ),
            );
        }
        check_scores(self.relevance.entries(), dims, &loc, report);
        if let Some(ac) = self.agent_count {
            if ac == 0 {
                report.push(&loc, "agent_count must be positive");
            }
        }
        for (k, action) in self.actions.iter().enumerate() {
            let aloc = format!("{loc} / action \"{}\"", action.id);
            if self.actions[..k].iter().any(|a| a.id == action.id) {
                report.push(&aloc, "duplicate action id");
            }
            if action.relevance.len() != dims.len() {
                report.push(
                    &aloc,
                    format!(
                        "relevance has {} entries, expected {}",
                        action.relevance.len(),
                        dims.len()
                    ),
                );
            }
            check_scores(action.relevance.entries(), dims, &aloc, report);
        }
    }
}

fn check_scores(entries: &[f64], dims: &DimensionSet, loc: &str, report: &mut ValidationReport) {
    for (j, &x) in entries.iter().enumerate() {
        if !(x >= -1.0 && x <= 1.0) {
            let dim = if j < dims.len() {
                dims.name(j).to_string()
            } else {
                format!("#{j}")
            };
            report.push(
                format!("{loc} / dimension \"{dim}\""),
                format!("score {x} outside [-1, 1]"),
            );
        }
    }
}

/// Ablation variants of the scoring and aggregation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The complete pipeline.
    Full,
    /// Rank from raw action scores only; aggregation bypasses the trace.
    OnlyAction,
    /// Drop the preference weighting in aggregation.
    NoPreference,
    /// Blend stage passes objective scores through unchanged.
    NoSubjective,
    /// Skip the scenario scaling stage.
    NoScenario,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Full,
        Variant::OnlyAction,
        Variant::NoPreference,
        Variant::NoSubjective,
        Variant::NoScenario,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::OnlyAction => "only_action",
            Variant::NoPreference => "no_preference",
            Variant::NoSubjective => "no_subjective",
            Variant::NoScenario => "no_scenario",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "only_action" => Ok(Variant::OnlyAction),
            "no_preference" => Ok(Variant::NoPreference),
            "no_subjective" => Ok(Variant::NoSubjective),
            "no_scenario" => Ok(Variant::NoScenario),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Scoring pipeline parameters. Defaults reproduce the full model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    /// Weight of the discrepancy term in the scenario blend.
    pub scenario_weight: f64,
    /// Weight of the discrepancy term in the action blend.
    pub action_weight: f64,
    /// Steepness of the preference preprocessing sigmoid.
    pub steepness: f64,
    pub variant: Variant,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            scenario_weight: DEFAULT_SCENARIO_WEIGHT,
            action_weight: DEFAULT_ACTION_WEIGHT,
            steepness: DEFAULT_STEEPNESS,
            variant: Variant::Full,
        }
    }
}

impl ScoringConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scenario_weight >= 0.0 && self.scenario_weight <= 1.0) {
            return Err(Error::out_of_range("scenario_weight", self.scenario_weight, 0.0, 1.0));
        }
        if !(self.action_weight >= 0.0 && self.action_weight <= 1.0) {
            return Err(Error::out_of_range("action_weight", self.action_weight, 0.0, 1.0));
        }
        if !(self.steepness > 0.0) {
            return Err(Error::Config(format!(
                "steepness must be positive, got {}",
                self.steepness
            )));
        }
        Ok(())
    }
}

/// Every intermediate of the scoring pipeline, recomputable from its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTrace {
    pub variant: Variant,
    pub dimension_count: usize,
    /// Scenario relevance, discrepancy, and blended score per dimension.
    pub scenario_relevance: Vec<f64>,
    pub scenario_discrepancy: Vec<f64>,
    pub scenario_blend: Vec<f64>,
    /// Per action, per dimension: relevance, discrepancy, blend, and the
    /// final contextualized score.
    pub action_relevance: Vec<Vec<f64>>,
    pub action_discrepancy: Vec<Vec<f64>>,
    pub action_blend: Vec<Vec<f64>>,
    pub contextualized: Vec<Vec<f64>>,
}

impl ScoreTrace {
    pub fn action_count(&self) -> usize {
        self.contextualized.len()
    }
}

/// Transforms raw preferences through the steep sigmoid.
///
/// Keeps moderate weights near 0.5 and pushes distinct ones toward the
/// extremes; output entries are strictly inside `(0, 1)`.
pub fn preprocess_preferences(raw: &[f64], steepness: f64) -> Result<Vec<f64>> {
    if !(steepness > 0.0) {
        return Err(Error::Config(format!(
            "steepness must be positive, got {steepness}"
        )));
    }
    for (j, &p) in raw.iter().enumerate() {
        if !(p >= 0.0 && p <= 1.0) {
            return Err(Error::out_of_range(format!("preference entry {j}"), p, 0.0, 1.0));
        }
    }
    Ok(raw
        .iter()
        .map(|&p| sigmoid(steepness * (p - 0.5)))
        .collect())
}

/// Discrepancy between a score's magnitude and a transformed preference:
/// `1 - ||relevance| - preference_t|`, always in `[0, 1]`.
pub fn discrepancy(relevance: f64, preference_t: f64) -> Result<f64> {
    if !(relevance >= -1.0 && relevance <= 1.0) {
        return Err(Error::out_of_range("relevance", relevance, -1.0, 1.0));
    }
    if !(preference_t >= 0.0 && preference_t <= 1.0) {
        return Err(Error::out_of_range("preference_t", preference_t, 0.0, 1.0));
    }
    Ok(discrepancy_unchecked(relevance, preference_t))
}

#[inline]
pub(crate) fn discrepancy_unchecked(relevance: f64, preference_t: f64) -> f64 {
    1.0 - (relevance.abs() - preference_t).abs()
}

/// Weighted blend of discrepancy and objective score: `d*w + rho*(1-w)`.
pub fn blend(objective: f64, discrepancy: f64, weight: f64) -> Result<f64> {
    if !(weight >= 0.0 && weight <= 1.0) {
        return Err(Error::out_of_range("weight", weight, 0.0, 1.0));
    }
    Ok(blend_unchecked(objective, discrepancy, weight))
}

#[inline]
pub(crate) fn blend_unchecked(objective: f64, discrepancy: f64, weight: f64) -> f64 {
    discrepancy * weight + objective * (1.0 - weight)
}

/// Scenario scaling: multiplies an action's blended score by
/// `sigmoid(|scenario_blend|)`, a coefficient in `[0.5, sigmoid(1))` for
/// scenario blends in `[-1, 1]`.
pub fn contextualize(action_blend: f64, scenario_blend: f64) -> f64 {
    sigmoid(scenario_blend.abs()) * action_blend
}

/// Runs the full contextualized scoring pipeline for one scenario.
///
/// The returned trace is a pure function of `(scenario, profile, config)`;
/// repeated calls give bitwise-identical results.
pub fn score_scenario(
    scenario: &AnnotatedScenario,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
) -> Result<ScoreTrace> {
    config.validate()?;
    let m = profile.len();
    if scenario.relevance.len() != m {
        return Err(Error::DimensionMismatch {
            location: format!("scenario \"{}\" relevance", scenario.id),
            expected: m,
            actual: scenario.relevance.len(),
        });
    }
    for action in &scenario.actions {
        if action.relevance.len() != m {
            return Err(Error::DimensionMismatch {
                location: format!("scenario \"{}\" / action \"{}\"", scenario.id, action.id),
                expected: m,
                actual: action.relevance.len(),
            });
        }
    }
    if scenario.actions.is_empty() {
        return Err(Error::Config(format!(
            "scenario \"{}\" has no actions",
            scenario.id
        )));
    }

    // The transformed profile reflects the profile's own steepness. When the
    // config asks for a different steepness, re-derive p' from the raw weights.
    let transformed: Vec<f64> = if (config.steepness - profile.steepness()).abs() < f64::EPSILON {
        profile.transformed().to_vec()
    } else {
        preprocess_preferences(profile.raw().entries(), config.steepness)?
    };

    let pass_through = config.variant == Variant::NoSubjective;

    let scenario_relevance = scenario.relevance.entries().to_vec();
    let scenario_discrepancy: Vec<f64> = scenario_relevance
        .iter()
        .zip(&transformed)
        .map(|(&rho, &p)| discrepancy_unchecked(rho, p))
        .collect();
    let scenario_blend: Vec<f64> = if pass_through {
        scenario_relevance.clone()
    } else {
        scenario_relevance
            .iter()
            .zip(&scenario_discrepancy)
            .map(|(&rho, &d)| blend_unchecked(rho, d, config.scenario_weight))
            .collect()
    };

    let n = scenario.actions.len();
    let mut action_relevance = Vec::with_capacity(n);
    let mut action_discrepancy = Vec::with_capacity(n);
    let mut action_blend = Vec::with_capacity(n);
    let mut contextualized = Vec::with_capacity(n);

    for action in &scenario.actions {
        let rho = action.relevance.entries().to_vec();
        let d: Vec<f64> = rho
            .iter()
            .zip(&transformed)
            .map(|(&r, &p)| discrepancy_unchecked(r, p))
            .collect();
        let blended: Vec<f64> = if pass_through {
            rho.clone()
        } else {
            rho.iter()
                .zip(&d)
                .map(|(&r, &dd)| blend_unchecked(r, dd, config.action_weight))
                .collect()
        };
        let ctx: Vec<f64> = match config.variant {
            Variant::NoScenario => blended.clone(),
            _ => blended
                .iter()
                .zip(&scenario_blend)
                .map(|(&rb, &sb)| contextualize(rb, sb))
                .collect(),
        };
        action_relevance.push(rho);
        action_discrepancy.push(d);
        action_blend.push(blended);
        contextualized.push(ctx);
    }

    Ok(ScoreTrace {
        variant: config.variant,
        dimension_count: m,
        scenario_relevance,
        scenario_discrepancy,
        scenario_blend,
        action_relevance,
        action_discrepancy,
        action_blend,
        contextualized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn profile(raw: Vec<f64>) -> PreferenceProfile {
        PreferenceProfile::from_raw(ValueVector::preference(raw).unwrap()).unwrap()
    }

    #[test]
    fn preprocess_midpoint_is_half() {
        let out = preprocess_preferences(&[0.5], 10.0).unwrap();
        assert_abs_diff_eq!(out[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn preprocess_extremes() {
        // 1/(1+e^-5) and 1/(1+e^5)
        let out = preprocess_preferences(&[1.0, 0.0], 10.0).unwrap();
        assert_abs_diff_eq!(out[0], 0.993_307_149_075_715, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1], 0.006_692_850_924_284_856, epsilon = 1e-12);
        assert_abs_diff_eq!(out[0] + out[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn preprocess_rejects_out_of_range() {
        let err = preprocess_preferences(&[1.2], 10.0).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
        assert!(err.to_string().contains("1.2"));
    }

    #[test]
    fn discrepancy_examples() {
        assert_abs_diff_eq!(discrepancy(0.8, 0.8).unwrap(), 1.0);
        assert_abs_diff_eq!(discrepancy(-0.8, 0.8).unwrap(), 1.0);
        assert_abs_diff_eq!(discrepancy(0.2, 0.9).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn blend_examples() {
        assert_abs_diff_eq!(blend(1.0, 1.0, 0.3).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(blend(0.0, 0.0, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(blend(-1.0, 1.0, 0.3).unwrap(), -0.4, epsilon = 1e-12);
    }

    #[test]
    fn contextualize_examples() {
        assert_abs_diff_eq!(contextualize(0.6, 0.0), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(contextualize(1.0, 1.0), 0.731_058_578_630_0049, epsilon = 1e-12);
        assert_abs_diff_eq!(contextualize(1.0, -1.0), 0.731_058_578_630_0049, epsilon = 1e-12);
    }

    #[test]
    fn contextualize_is_odd_in_action_argument() {
        assert_eq!(contextualize(-0.37, 0.9), -contextualize(0.37, 0.9));
    }

    fn fixture_scenario() -> AnnotatedScenario {
        AnnotatedScenario {
            id: "fix".into(),
            text: String::new(),
            relevance: ValueVector::relevance(vec![0.4, -0.6]).unwrap(),
            actions: vec![
                AnnotatedAction {
                    id: "a".into(),
                    text: String::new(),
                    relevance: ValueVector::relevance(vec![0.8, 0.1]).unwrap(),
                },
                AnnotatedAction {
                    id: "b".into(),
                    text: String::new(),
                    relevance: ValueVector::relevance(vec![-0.3, 0.9]).unwrap(),
                },
            ],
            agent_count: None,
            provenance: None,
        }
    }

    #[test]
    fn score_scenario_matches_hand_evaluation() {
        // Hand evaluation of the two-action fixture with raw prefs [0.7, 0.2],
        // steepness 10, w_s = w_a = 0.3.
        let prof = profile(vec![0.7, 0.2]);
        let p1 = 1.0 / (1.0 + (-2.0f64).exp());
        let p2 = 1.0 / (1.0 + (3.0f64).exp());
        let trace =
            score_scenario(&fixture_scenario(), &prof, &ScoringConfig::default()).unwrap();

        let ds = [
            1.0 - (0.4f64 - p1).abs(),
            1.0 - (0.6f64 - p2).abs(),
        ];
        let rs = [0.3 * ds[0] + 0.7 * 0.4, 0.3 * ds[1] + 0.7 * (-0.6)];
        assert_abs_diff_eq!(trace.scenario_discrepancy[0], ds[0], epsilon = 1e-12);
        assert_abs_diff_eq!(trace.scenario_blend[1], rs[1], epsilon = 1e-12);

        let da = 1.0 - (0.8f64 - p1).abs();
        let ra = 0.3 * da + 0.7 * 0.8;
        let expected = sigmoid(rs[0].abs()) * ra;
        assert_abs_diff_eq!(trace.contextualized[0][0], expected, epsilon = 1e-12);

        let db = 1.0 - (0.9f64 - p2).abs();
        let rb = 0.3 * db + 0.7 * 0.9;
        let expected_b = sigmoid(rs[1].abs()) * rb;
        assert_abs_diff_eq!(trace.contextualized[1][1], expected_b, epsilon = 1e-12);
    }

    #[test]
    fn zero_relevance_trace_is_pinned() {
        // With rho = 0 everywhere the formulas still produce nonzero scores
        // through the discrepancy path: d = 1 - p', r = 0.3 * (1 - p'), then
        // scenario scaling by sigmoid(0.3 * (1 - p')).
        let prof = profile(vec![0.5]);
        let scenario = AnnotatedScenario {
            id: "z".into(),
            text: String::new(),
            relevance: ValueVector::relevance(vec![0.0]).unwrap(),
            actions: vec![AnnotatedAction {
                id: "a".into(),
                text: String::new(),
                relevance: ValueVector::relevance(vec![0.0]).unwrap(),
            }],
            agent_count: None,
            provenance: None,
        };
        let trace = score_scenario(&scenario, &prof, &ScoringConfig::default()).unwrap();
        // p' = 0.5, d = 0.5, r = 0.15, scaling = sigmoid(0.15)
        assert_abs_diff_eq!(trace.scenario_blend[0], 0.15, epsilon = 1e-12);
        let expected = sigmoid(0.15) * 0.15;
        assert_abs_diff_eq!(trace.contextualized[0][0], expected, epsilon = 1e-12);
        assert_abs_diff_eq!(trace.contextualized[0][0], 0.080_614_476_801_562_43, epsilon = 1e-9);
    }

    #[test]
    fn no_scenario_variant_skips_scaling() {
        let prof = profile(vec![0.7, 0.2]);
        let trace = score_scenario(
            &fixture_scenario(),
            &prof,
            &ScoringConfig::with_variant(Variant::NoScenario),
        )
        .unwrap();
        assert_eq!(trace.contextualized, trace.action_blend);
    }

    #[test]
    fn no_subjective_variant_passes_objective_through() {
        let prof = profile(vec![0.7, 0.2]);
        let trace = score_scenario(
            &fixture_scenario(),
            &prof,
            &ScoringConfig::with_variant(Variant::NoSubjective),
        )
        .unwrap();
        assert_eq!(trace.action_blend, trace.action_relevance);
        assert_eq!(trace.scenario_blend, trace.scenario_relevance);
        // Scenario scaling still applies.
        let expected = sigmoid(0.4) * 0.8;
        assert_abs_diff_eq!(trace.contextualized[0][0], expected, epsilon = 1e-12);
    }

    #[test]
    fn score_scenario_is_deterministic() {
        let prof = profile(vec![0.7, 0.2]);
        let a = score_scenario(&fixture_scenario(), &prof, &ScoringConfig::default()).unwrap();
        let b = score_scenario(&fixture_scenario(), &prof, &ScoringConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let prof = profile(vec![0.5, 0.5, 0.5]);
        let err = score_scenario(&fixture_scenario(), &prof, &ScoringConfig::default());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dimension_set_rejects_duplicates() {
        let err = DimensionSet::new(vec!["a".into(), "a".into()]);
        assert!(err.is_err());
    }

    #[test]
    fn clamped_relevance_pulls_into_range() {
        let v = ValueVector::relevance_clamped(vec![1.0000001, -3.0]).unwrap();
        assert_eq!(v.entries(), &[1.0, -1.0]);
    }
}
