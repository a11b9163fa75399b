//! Brute-force reference ranking for test oracles.
//!
//! This module re-derives the whole pipeline as literal loops with its own
//! inline arithmetic. It deliberately shares no code with [`crate::values`]
//! or [`crate::ranking`] so that agreement between the two paths is
//! meaningful evidence. Guarded to small inputs; use only in tests and for
//! golden-file generation.

use crate::error::{Error, Result};
use crate::values::{AnnotatedScenario, PreferenceProfile, ScoringConfig, Variant};

/// Largest action count the oracle will accept.
pub const ORACLE_MAX_ACTIONS: usize = 12;

/// Net flows and order computed by the loop-literal reference path.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRanking {
    pub order: Vec<usize>,
    pub net_flows: Vec<f64>,
}

/// Reference ranking: a direct transcription of the scoring and outranking
/// formulas, one loop per step.
pub fn brute_force_rank(
    scenario: &AnnotatedScenario,
    profile: &PreferenceProfile,
    config: &ScoringConfig,
) -> Result<OracleRanking> {
    let n = scenario.actions.len();
    if n > ORACLE_MAX_ACTIONS {
        return Err(Error::OracleGuard {
            n,
            limit: ORACLE_MAX_ACTIONS,
        });
    }
    let m = profile.len();
    if scenario.relevance.len() != m {
        return Err(Error::DimensionMismatch {
            location: "oracle scenario relevance".into(),
            expected: m,
            actual: scenario.relevance.len(),
        });
    }

    let w_s = config.scenario_weight;
    let w_a = config.action_weight;

    // p'_j = 1 / (1 + e^{-k (p_j - 0.5)})
    let mut p_t = vec![0.0; m];
    for j in 0..m {
        let p = profile.raw().entries()[j];
        p_t[j] = 1.0 / (1.0 + (-config.steepness * (p - 0.5)).exp());
    }

    // r^s_j
    let mut r_s = vec![0.0; m];
    for j in 0..m {
        let rho = scenario.relevance.entries()[j];
        if config.variant == Variant::NoSubjective {
            r_s[j] = rho;
        } else {
            let d = 1.0 - (rho.abs() - p_t[j]).abs();
            r_s[j] = d * w_s + rho * (1.0 - w_s);
        }
    }

    // r_{i,j}
    let mut r = vec![vec![0.0; m]; n];
    for (i, action) in scenario.actions.iter().enumerate() {
        for j in 0..m {
            let rho = action.relevance.entries()[j];
            let r_a = if config.variant == Variant::NoSubjective {
                rho
            } else {
                let d = 1.0 - (rho.abs() - p_t[j]).abs();
                d * w_a + rho * (1.0 - w_a)
            };
            if config.variant == Variant::NoScenario {
                r[i][j] = r_a;
            } else {
                r[i][j] = (1.0 / (1.0 + (-r_s[j].abs()).exp())) * r_a;
            }
        }
    }

    // Weighted pairwise preference matrix, per variant.
    let mut agg = vec![vec![0.0; n]; n];
    for i in 0..n {
        for i2 in 0..n {
            let mut acc = 0.0;
            for j in 0..m {
                match config.variant {
                    Variant::OnlyAction => {
                        let a = scenario.actions[i].relevance.entries()[j];
                        let b = scenario.actions[i2].relevance.entries()[j];
                        acc += 1.0 / (1.0 + (-(a - b)).exp());
                    }
                    Variant::NoPreference => {
                        acc += 1.0 / (1.0 + (-(r[i][j] - r[i2][j])).exp());
                    }
                    _ => {
                        acc += p_t[j] * (1.0 / (1.0 + (-(r[i][j] - r[i2][j])).exp()));
                    }
                }
            }
            agg[i][i2] = acc;
        }
    }

    // Flows.
    let mut net_flows = vec![0.0; n];
    for i in 0..n {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for i2 in 0..n {
            if i2 != i {
                pos += agg[i][i2];
                neg += agg[i2][i];
            }
        }
        net_flows[i] = pos / n as f64 - neg / n as f64;
    }

    // Stable descending sort, ascending index on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        net_flows[b]
            .partial_cmp(&net_flows[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    Ok(OracleRanking { order, net_flows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{rank, Backend};
    use crate::values::{AnnotatedAction, ValueVector};

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
    fn oracle_matches_engine_on_fixture() {
        let prof =
            PreferenceProfile::from_raw(ValueVector::preference(vec![0.9, 0.1, 0.5]).unwrap())
                .unwrap();
        let sc = scenario(
            vec![0.3, -0.7, 0.1],
            vec![
                vec![0.8, 0.2, -0.4],
                vec![-0.1, 0.9, 0.5],
                vec![0.4, -0.6, 0.2],
                vec![0.0, 0.0, 0.0],
            ],
        );
        let config = ScoringConfig::default();
        let oracle = brute_force_rank(&sc, &prof, &config).unwrap();
        let engine = rank(&sc, &prof, &config, Backend::Promethee).unwrap();
        assert_eq!(oracle.order, engine.order);
        for (a, b) in oracle.net_flows.iter().zip(&engine.scores) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_single_action() {
        let prof = PreferenceProfile::from_raw(ValueVector::preference(vec![0.5]).unwrap()).unwrap();
        let sc = scenario(vec![0.2], vec![vec![0.4]]);
        let oracle = brute_force_rank(&sc, &prof, &ScoringConfig::default()).unwrap();
        assert_eq!(oracle.order, vec![0]);
        assert_eq!(oracle.net_flows, vec![0.0]);
    }

    #[test]
    fn oracle_guards_large_inputs() {
        let prof = PreferenceProfile::from_raw(ValueVector::preference(vec![0.5]).unwrap()).unwrap();
        let sc = scenario(vec![0.2], vec![vec![0.1]; 13]);
        assert!(matches!(
            brute_force_rank(&sc, &prof, &ScoringConfig::default()),
            Err(Error::OracleGuard { n: 13, .. })
        ));
    }

    #[test]
    fn oracle_is_permutation_equivariant() {
        let prof =
            PreferenceProfile::from_raw(ValueVector::preference(vec![0.8, 0.2]).unwrap()).unwrap();
        let sc = scenario(
            vec![0.3, -0.2],
            vec![vec![0.7, 0.1], vec![-0.5, 0.9], vec![0.2, 0.2]],
        );
        let mut permuted = sc.clone();
        permuted.actions.rotate_left(1);
        let a = brute_force_rank(&sc, &prof, &ScoringConfig::default()).unwrap();
        let b = brute_force_rank(&permuted, &prof, &ScoringConfig::default()).unwrap();
        // index k in permuted corresponds to index (k + 1) % 3 in the original
        let mapped: Vec<usize> = b.order.iter().map(|&k| (k + 1) % 3).collect();
        assert_eq!(a.order, mapped);
    }
}
