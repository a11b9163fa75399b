//! Pairwise outranking and the alternative MCDA backends.
//!
//! The main path composes `score_scenario` with pairwise sigmoid
//! preferences, preference-weighted aggregation, and net outranking flows.
//! MAUT, TOPSIS, and AHP consume the same contextualized score matrix and
//! transformed weights; their exact conventions are labeled in the result
//! metadata because they are this crate's conventions, not reproductions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::values::{
    sigmoid, score_scenario, AnnotatedScenario, PreferenceProfile, ScoreTrace, ScoringConfig,
    Variant,
};

/// Saaty random consistency indices by matrix size (index = n, up to 10).
const AHP_RANDOM_INDEX: [f64; 11] = [
    0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49,
];

/// Pairwise preference degrees `V[i][i'][j] = sigmoid(r_i_j - r_i'_j)`.
///
/// Stored flat, indexed `(i * n + i') * m + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwisePreferenceTensor {
    n: usize,
    m: usize,
    values: Vec<f64>,
}

impl PairwisePreferenceTensor {
    /// Builds the tensor from any n x m score matrix.
    pub fn from_scores(scores: &[Vec<f64>]) -> Self {
        let n = scores.len();
        let m = scores.first().map_or(0, Vec::len);
        let mut values = vec![0.0; n * n * m];
        for i in 0..n {
            for i2 in 0..n {
                for j in 0..m {
                    values[(i * n + i2) * m + j] = sigmoid(scores[i][j] - scores[i2][j]);
                }
            }
        }
        Self { n, m, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, i2: usize, j: usize) -> f64 {
        self.values[(i * self.n + i2) * self.m + j]
    }
}

/// Pairwise preferences over the contextualized scores of a trace.
pub fn pairwise_preferences(trace: &ScoreTrace) -> PairwisePreferenceTensor {
    PairwisePreferenceTensor::from_scores(&trace.contextualized)
}

/// Positive, negative, and net outranking flows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub net: Vec<f64>,
}

/// Collapses the per-dimension tensor into an n x n preference matrix.
///
/// Full, no-subjective, and no-scenario variants weight each dimension by
/// the transformed preference `p'_j`; the no-preference variant sums
/// dimensions unweighted. The only-action variant also sums unweighted but
/// expects a tensor built from raw action relevances (see [`rank`]).
pub fn aggregate_preferences(
    tensor: &PairwisePreferenceTensor,
    profile: &PreferenceProfile,
    variant: Variant,
) -> Result<Vec<Vec<f64>>> {
    let weighted = match variant {
        Variant::Full | Variant::NoSubjective | Variant::NoScenario => true,
        Variant::NoPreference | Variant::OnlyAction => false,
    };
    if weighted && profile.len() != tensor.m() {
        return Err(Error::DimensionMismatch {
            location: "aggregate_preferences".into(),
            expected: tensor.m(),
            actual: profile.len(),
        });
    }
    let n = tensor.n();
    let weights = profile.transformed();
    let mut agg = vec![vec![0.0; n]; n];
    for i in 0..n {
        for i2 in 0..n {
            let mut acc = 0.0;
            for j in 0..tensor.m() {
                let v = tensor.get(i, i2, j);
                acc += if weighted { weights[j] * v } else { v };
            }
            agg[i][i2] = acc;
        }
    }
    Ok(agg)
}

/// Net outranking flows from an aggregated preference matrix.
///
/// Off-diagonal sums are divided by n, matching the published formula (the
/// conventional 1/(n-1) divisor rescales all flows by the same positive
/// factor and cannot change the order).
pub fn promethee_flows(agg: &[Vec<f64>]) -> FlowSummary {
    let n = agg.len();
    let mut positive = vec![0.0; n];
    let mut negative = vec![0.0; n];
    for i in 0..n {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for i2 in 0..n {
            if i2 != i {
                pos += agg[i][i2];
                neg += agg[i2][i];
            }
        }
        positive[i] = pos / n as f64;
        negative[i] = neg / n as f64;
    }
    let net = positive
        .iter()
        .zip(&negative)
        .map(|(p, q)| p - q)
        .collect();
    FlowSummary {
        positive,
        negative,
        net,
    }
}

/// Which MCDA method turns scores into an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Promethee,
    Maut,
    Topsis,
    Ahp,
}

impl Backend {
    pub const ALL: [Backend; 4] = [Backend::Promethee, Backend::Maut, Backend::Topsis, Backend::Ahp];

    pub fn label(self) -> &'static str {
        match self {
            Backend::Promethee => "promethee",
            Backend::Maut => "maut",
            Backend::Topsis => "topsis",
            Backend::Ahp => "ahp",
        }
    }

    /// Backends other than PROMETHEE follow conventions chosen by this
    /// crate; the note travels with every result so comparison tables are
    /// not mistaken for faithful reproductions.
    pub fn convention_note(self) -> Option<&'static str> {
        match self {
            Backend::Promethee => None,
            Backend::Maut => Some("convention: additive utility over contextualized scores"),
            Backend::Topsis => Some(
                "convention: vector-normalized benefit criteria over contextualized scores",
            ),
            Backend::Ahp => Some(
                "convention: consistent ratio matrices from score differences, eigenvector priorities",
            ),
        }
    }
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Promethee
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "promethee" => Ok(Backend::Promethee),
            "maut" => Ok(Backend::Maut),
            "topsis" => Ok(Backend::Topsis),
            "ahp" => Ok(Backend::Ahp),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

/// A ranked action list plus the scores that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    /// Action indices, best first; ties broken by ascending original index.
    pub order: Vec<usize>,
    /// Per-action score in original action order (net flow, utility,
    /// closeness, or AHP priority depending on the backend).
    pub scores: Vec<f64>,
    pub backend: Backend,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flows: Option<FlowSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention_note: Option<String>,
    /// AHP consistency ratio warning, populated when CR exceeds 0.1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ScoreTrace>,
}

/// Stable descending sort of indices by score, ascending index on ties.
pub fn order_by_scores(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// Ranks a scenario's actions for one preference profile.
pub fn rank(
    scenario: &AnnotatedScenario,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
    backend: Backend,
) -> Result<RankingResult> {
    let trace = score_scenario(scenario, profile, config)?;
    rank_trace(scenario, &trace, profile, config, backend)
}

/// Same as [`rank`] but reuses an existing trace.
pub fn rank_trace(
    scenario: &AnnotatedScenario,
    trace: &ScoreTrace,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
    backend: Backend,
) -> Result<RankingResult> {
    let mut result = match backend {
        Backend::Promethee => {
            let tensor = if config.variant == Variant::OnlyAction {
                // Raw action relevances, bypassing the scoring pipeline.
                let raw: Vec<Vec<f64>> = scenario
                    .actions
                    .iter()
                    .map(|a| a.relevance.entries().to_vec())
                    .collect();
                PairwisePreferenceTensor::from_scores(&raw)
            } else {
                pairwise_preferences(trace)
            };
            let agg = aggregate_preferences(&tensor, profile, config.variant)?;
            let flows = promethee_flows(&agg);
            RankingResult {
                order: order_by_scores(&flows.net),
                scores: flows.net.clone(),
                backend,
                flows: Some(flows),
                convention_note: None,
                consistency_warning: None,
                trace: None,
            }
        }
        Backend::Maut => {
            let scores = maut_scores(trace, profile)?;
            RankingResult {
                order: order_by_scores(&scores),
                scores,
                backend,
                flows: None,
                convention_note: backend.convention_note().map(String::from),
                consistency_warning: None,
                trace: None,
            }
        }
        Backend::Topsis => {
            let scores = topsis_scores(trace, profile)?;
            RankingResult {
                order: order_by_scores(&scores),
                scores,
                backend,
                flows: None,
                convention_note: backend.convention_note().map(String::from),
                consistency_warning: None,
                trace: None,
            }
        }
        Backend::Ahp => {
            let (scores, cr) = ahp_scores(trace, profile)?;
            let warning = (cr > 0.1).then(|| format!("consistency ratio {cr:.4} exceeds 0.1"));
            RankingResult {
                order: order_by_scores(&scores),
                scores,
                backend,
                flows: None,
                convention_note: backend.convention_note().map(String::from),
                consistency_warning: warning,
                trace: None,
            }
        }
    };
    result.trace = Some(trace.clone());
    Ok(result)
}

fn check_dims(trace: &ScoreTrace, profile: &PreferenceProfile) -> Result<()> {
    if trace.dimension_count != profile.len() {
        return Err(Error::DimensionMismatch {
            location: "backend scoring".into(),
            expected: trace.dimension_count,
            actual: profile.len(),
        });
    }
    Ok(())
}

/// Additive utility: `u_i = sum_j p'_j * r_i_j`.
pub fn maut_scores(trace: &ScoreTrace, profile: &PreferenceProfile) -> Result<Vec<f64>> {
    check_dims(trace, profile)?;
    let weights = profile.transformed();
    Ok(trace
        .contextualized
        .iter()
        .map(|row| row.iter().zip(weights).map(|(r, w)| r * w).sum())
        .collect())
}

/// TOPSIS closeness coefficients over the contextualized score matrix.
///
/// Columns are vector-normalized, weighted by `p'` normalized to sum 1, and
/// every dimension is treated as a benefit criterion.
pub fn topsis_scores(trace: &ScoreTrace, profile: &PreferenceProfile) -> Result<Vec<f64>> {
    check_dims(trace, profile)?;
    let n = trace.action_count();
    let m = trace.dimension_count;
    let wsum: f64 = profile.transformed().iter().sum();
    let weights: Vec<f64> = profile.transformed().iter().map(|w| w / wsum).collect();

    let mut weighted = vec![vec![0.0; m]; n];
    for j in 0..m {
        let norm: f64 = trace
            .contextualized
            .iter()
            .map(|row| row[j] * row[j])
            .sum::<f64>()
            .sqrt();
        for i in 0..n {
            weighted[i][j] = if norm > 0.0 {
                weights[j] * trace.contextualized[i][j] / norm
            } else {
                0.0
            };
        }
    }

    let mut ideal = vec![f64::NEG_INFINITY; m];
    let mut anti = vec![f64::INFINITY; m];
    for row in &weighted {
        for j in 0..m {
            ideal[j] = ideal[j].max(row[j]);
            anti[j] = anti[j].min(row[j]);
        }
    }

    Ok(weighted
        .iter()
        .map(|row| {
            let d_pos: f64 = row
                .iter()
                .zip(&ideal)
                .map(|(v, i)| (v - i) * (v - i))
                .sum::<f64>()
                .sqrt();
            let d_neg: f64 = row
                .iter()
                .zip(&anti)
                .map(|(v, a)| (v - a) * (v - a))
                .sum::<f64>()
                .sqrt();
            let denom = d_pos + d_neg;
            // All alternatives identical in every criterion: any constant
            // preserves the (fully tied) order.
            if denom > 0.0 {
                d_neg / denom
            } else {
                0.5
            }
        })
        .collect())
}

/// AHP global priorities with a consistency ratio.
///
/// Per dimension, the pairwise matrix `a[i][i'] = exp(r_i_j - r_i'_j)` is
/// consistent by construction; local priorities come from power iteration
/// and are weighted by normalized `p'`.
pub fn ahp_scores(trace: &ScoreTrace, profile: &PreferenceProfile) -> Result<(Vec<f64>, f64)> {
    check_dims(trace, profile)?;
    let n = trace.action_count();
    let m = trace.dimension_count;
    let wsum: f64 = profile.transformed().iter().sum();
    let weights: Vec<f64> = profile.transformed().iter().map(|w| w / wsum).collect();

    let mut global = vec![0.0; n];
    let mut worst_cr: f64 = 0.0;
    for j in 0..m {
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|i2| (trace.contextualized[i][j] - trace.contextualized[i2][j]).exp())
                    .collect()
            })
            .collect();
        let (local, lambda_max) = principal_eigenvector(&matrix);
        let cr = consistency_ratio(lambda_max, n);
        worst_cr = worst_cr.max(cr);
        for i in 0..n {
            global[i] += weights[j] * local[i];
        }
    }
    Ok((global, worst_cr))
}

/// Power iteration for the principal eigenvector of a positive matrix,
/// normalized to sum 1. Returns the vector and the Perron eigenvalue.
fn principal_eigenvector(matrix: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = matrix.len();
    if n == 1 {
        return (vec![1.0], 1.0);
    }
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..100 {
        let mut next: Vec<f64> = matrix
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum())
            .collect();
        let sum: f64 = next.iter().sum();
        for x in &mut next {
            *x /= sum;
        }
        let delta: f64 = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta < 1e-14 {
            break;
        }
    }
    let av: Vec<f64> = matrix
        .iter()
        .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>())
        .collect();
    let lambda = av
        .iter()
        .zip(&v)
        .map(|(num, den)| num / den)
        .sum::<f64>()
        / n as f64;
    (v, lambda)
}

fn consistency_ratio(lambda_max: f64, n: usize) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
    let ri = if n < AHP_RANDOM_INDEX.len() {
        AHP_RANDOM_INDEX[n]
    } else {
        1.49
    };
    ci / ri
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::{AnnotatedAction, ValueVector};
    use approx::assert_abs_diff_eq;

    fn profile(raw: Vec<f64>) -> PreferenceProfile {
        PreferenceProfile::from_raw(ValueVector::preference(raw).unwrap()).unwrap()
    }

    fn scenario(scenario_rho: Vec<f64>, action_rhos: Vec<Vec<f64>>) -> AnnotatedScenario {
        AnnotatedScenario {
            id: "s".into(),
            text: String::new(),
            relevance: ValueVector::relevance(scenario_rho).unwrap(),
            actions: action_rhos
                .into_iter()
                .enumerate()
                .map(|(i, rho)| AnnotatedAction {
                    id: format!("a{i}"),
                    text: String::new(),
                    relevance: ValueVector::relevance(rho).unwrap(),
                })
                .collect(),
            agent_count: None,
            provenance: None,
        }
    }

    #[test]
    fn tensor_antisymmetry_and_diagonal() {
        let scores = vec![vec![0.3, -0.2], vec![-0.5, 0.9], vec![0.0, 0.0]];
        let t = PairwisePreferenceTensor::from_scores(&scores);
        for i in 0..3 {
            for i2 in 0..3 {
                for j in 0..2 {
                    assert_abs_diff_eq!(t.get(i, i2, j) + t.get(i2, i, j), 1.0, epsilon = 1e-12);
                }
            }
            for j in 0..2 {
                assert_eq!(t.get(i, i, j), 0.5);
            }
        }
    }

    #[test]
    fn tensor_unit_difference() {
        let scores = vec![vec![1.0], vec![0.0]];
        let t = PairwisePreferenceTensor::from_scores(&scores);
        assert_abs_diff_eq!(t.get(0, 1, 0), 0.731_058_578_630_0049, epsilon = 1e-12);
    }

    #[test]
    fn single_action_tensor_is_half() {
        let t = PairwisePreferenceTensor::from_scores(&[vec![0.4, 0.1]]);
        assert_eq!(t.n(), 1);
        assert_eq!(t.get(0, 0, 0), 0.5);
        assert_eq!(t.get(0, 0, 1), 0.5);
    }

    #[test]
    fn flows_two_actions_by_hand() {
        let agg = vec![vec![0.0, 0.7], vec![0.3, 0.0]];
        let flows = promethee_flows(&agg);
        assert_abs_diff_eq!(flows.net[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(flows.net[1], -0.2, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_matrix_gives_zero_flows() {
        let agg = vec![vec![0.0, 0.4, 0.6], vec![0.4, 0.0, 0.5], vec![0.6, 0.5, 0.0]];
        let flows = promethee_flows(&agg);
        for x in flows.net {
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_action_flows_are_zero() {
        let flows = promethee_flows(&[vec![0.0]]);
        assert_eq!(flows.net, vec![0.0]);
    }

    #[test]
    fn flow_conservation() {
        let agg = vec![
            vec![0.0, 0.9, 0.2, 0.4],
            vec![0.1, 0.0, 0.8, 0.3],
            vec![0.8, 0.2, 0.0, 0.6],
            vec![0.6, 0.7, 0.4, 0.0],
        ];
        let flows = promethee_flows(&agg);
        let total: f64 = flows.net.iter().sum();
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn aggregate_single_dimension_by_hand() {
        // m = 1, p' = 0.5 (raw 0.5), V = 0.8 => 0.4
        let prof = profile(vec![0.5]);
        let t = PairwisePreferenceTensor {
            n: 2,
            m: 1,
            values: vec![0.5, 0.8, 0.2, 0.5],
        };
        let agg = aggregate_preferences(&t, &prof, Variant::Full).unwrap();
        assert_abs_diff_eq!(agg[0][1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn uniform_weights_match_unweighted_order() {
        let prof = profile(vec![0.7, 0.7, 0.7]);
        let sc = scenario(
            vec![0.2, -0.1, 0.5],
            vec![
                vec![0.9, 0.1, -0.2],
                vec![-0.3, 0.8, 0.4],
                vec![0.1, 0.2, 0.3],
                vec![-0.6, -0.4, 0.9],
            ],
        );
        let full = rank(&sc, &prof, &ScoringConfig::default(), Backend::Promethee).unwrap();
        let nopref = rank(
            &sc,
            &prof,
            &ScoringConfig::with_variant(Variant::NoPreference),
            Backend::Promethee,
        )
        .unwrap();
        assert_eq!(full.order, nopref.order);
    }

    #[test]
    fn single_candidate_ranks_first() {
        let prof = profile(vec![0.5, 0.5]);
        let sc = scenario(vec![0.1, 0.2], vec![vec![0.3, 0.4]]);
        let result = rank(&sc, &prof, &ScoringConfig::default(), Backend::Promethee).unwrap();
        assert_eq!(result.order, vec![0]);
        assert_eq!(result.flows.unwrap().net, vec![0.0]);
    }

    #[test]
    fn duplicate_actions_tie_break_by_index() {
        let prof = profile(vec![0.6, 0.4]);
        let sc = scenario(
            vec![0.5, -0.5],
            vec![vec![0.2, 0.3], vec![0.9, -0.1], vec![0.2, 0.3]],
        );
        let result = rank(&sc, &prof, &ScoringConfig::default(), Backend::Promethee).unwrap();
        let pos0 = result.order.iter().position(|&i| i == 0).unwrap();
        let pos2 = result.order.iter().position(|&i| i == 2).unwrap();
        assert_eq!(pos2, pos0 + 1, "identical actions must stay adjacent, lower index first");
    }

    #[test]
    fn all_backends_rank_dominant_action_first() {
        let prof = profile(vec![0.8, 0.3, 0.6]);
        let sc = scenario(
            vec![0.4, 0.2, -0.3],
            vec![
                vec![0.9, 0.8, 0.7],
                vec![0.1, 0.2, 0.3],
                vec![0.5, -0.5, 0.6],
            ],
        );
        for backend in Backend::ALL {
            let result = rank(&sc, &prof, &ScoringConfig::default(), backend).unwrap();
            assert_eq!(result.order[0], 0, "backend {:?}", backend);
        }
    }

    #[test]
    fn ahp_is_consistent_by_construction() {
        let prof = profile(vec![0.8, 0.3]);
        let sc = scenario(
            vec![0.4, 0.2],
            vec![vec![0.9, -0.8], vec![0.1, 0.2], vec![0.5, -0.5]],
        );
        let result = rank(&sc, &prof, &ScoringConfig::default(), Backend::Ahp).unwrap();
        assert!(result.consistency_warning.is_none());
    }

    #[test]
    fn maut_weighs_by_transformed_preferences() {
        let prof = profile(vec![0.5]);
        let trace = ScoreTrace {
            variant: Variant::Full,
            dimension_count: 1,
            scenario_relevance: vec![0.0],
            scenario_discrepancy: vec![0.0],
            scenario_blend: vec![0.0],
            action_relevance: vec![vec![0.0], vec![0.0]],
            action_discrepancy: vec![vec![0.0], vec![0.0]],
            action_blend: vec![vec![0.0], vec![0.0]],
            contextualized: vec![vec![0.8], vec![0.4]],
        };
        let scores = maut_scores(&trace, &prof).unwrap();
        assert_abs_diff_eq!(scores[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(scores[1], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn unknown_backend_and_variant_parse_errors() {
        assert!("nope".parse::<Backend>().is_err());
        assert!("nope".parse::<Variant>().is_err());
    }
}
