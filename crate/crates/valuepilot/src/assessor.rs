//! Pluggable sources of relevance scores.
//!
//! The engine only needs `[-1, 1]` relevance vectors for a scenario and
//! its actions. They can come from corpus annotations, a remote model
//! server speaking the `assess/1` wire protocol, or a constant stub.
//! Strict mode rejects any out-of-range score; lenient mode clamps and
//! logs, since serialized tanh outputs can round slightly outside range.

use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::CorpusFile;
use crate::error::{Error, Result};
use crate::values::{DimensionSet, ValueVector};

/// Version segment of the remote wire protocol.
pub const PROTOCOL_VERSION: &str = "assess/1";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_MAX_RETRIES: u32 = 2;

/// Environment variable overriding the remote endpoint base URL.
pub const ENV_ENDPOINT: &str = "VALUEPILOT_ASSESSOR_URL";
/// Environment variable overriding the request timeout in milliseconds.
pub const ENV_TIMEOUT_MS: &str = "VALUEPILOT_ASSESSOR_TIMEOUT_MS";

/// What to do with scores outside `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePolicy {
    /// Reject the whole response, naming the offending index.
    #[default]
    Strict,
    /// Clamp into range and log a warning.
    Clamp,
}

/// A scoring request: scenario and action texts plus dimension labels,
/// sent verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessorRequest {
    pub scenario_text: String,
    pub action_texts: Vec<String>,
    pub dimension_set: DimensionSet,
    /// Set when the annotation source should resolve stored scores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_id: Option<String>,
}

impl AssessorRequest {
    pub fn validate(&self) -> Result<()> {
        if self.scenario_text.is_empty() {
            return Err(Error::Config("scenario text must be non-empty".into()));
        }
        Ok(())
    }
}

/// Scores for a scenario and each of its actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessorResponse {
    pub scenario_scores: ValueVector,
    pub action_scores: Vec<ValueVector>,
    /// Transport retries consumed before this response arrived.
    #[serde(default)]
    pub retries: u32,
}

/// Wire shape of a remote request body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireRequest {
    pub version: String,
    pub scenario: String,
    pub actions: Vec<String>,
    pub dimensions: Vec<String>,
}

/// Wire shape of a remote response body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireResponse {
    pub version: String,
    pub scenario_scores: Vec<f64>,
    pub action_scores: Vec<Vec<f64>>,
}

/// Serializes a request into the documented body.
pub fn encode_request(request: &AssessorRequest) -> String {
    let wire = WireRequest {
        version: PROTOCOL_VERSION.to_string(),
        scenario: request.scenario_text.clone(),
        actions: request.action_texts.clone(),
        dimensions: request.dimension_set.names().to_vec(),
    };
    serde_json::to_string(&wire).expect("wire request serialization cannot fail")
}

/// Parses and validates a response body.
///
/// Pure and side-effect free; every score entering the engine passes the
/// range contract here regardless of what the server sent.
pub fn parse_response(
    body: &str,
    dimension_count: usize,
    action_count: usize,
    policy: RangePolicy,
) -> Result<AssessorResponse> {
    let wire: WireResponse = serde_json::from_str(body).map_err(|e| Error::Remote {
        retries: 0,
        message: format!("malformed response body: {e}"),
    })?;
    if wire.version != PROTOCOL_VERSION {
        return Err(Error::Remote {
            retries: 0,
            message: format!(
                "protocol version mismatch: expected \"{PROTOCOL_VERSION}\", got \"{}\"",
                wire.version
            ),
        });
    }
    if wire.scenario_scores.len() != dimension_count {
        return Err(Error::DimensionMismatch {
            location: "remote scenario scores".into(),
            expected: dimension_count,
            actual: wire.scenario_scores.len(),
        });
    }
    if wire.action_scores.len() != action_count {
        return Err(Error::DimensionMismatch {
            location: "remote action score list".into(),
            expected: action_count,
            actual: wire.action_scores.len(),
        });
    }
    for (i, scores) in wire.action_scores.iter().enumerate() {
        if scores.len() != dimension_count {
            return Err(Error::DimensionMismatch {
                location: format!("remote action {i} scores"),
                expected: dimension_count,
                actual: scores.len(),
            });
        }
    }
    let convert = |entries: Vec<f64>, what: &str| -> Result<ValueVector> {
        match policy {
            RangePolicy::Strict => ValueVector::relevance(entries).map_err(|e| match e {
                Error::OutOfRange {
                    location,
                    value,
                    min,
                    max,
                } => Error::OutOfRange {
                    location: format!("{what} {location}"),
                    value,
                    min,
                    max,
                },
                other => other,
            }),
            RangePolicy::Clamp => {
                if entries.iter().any(|x| !(-1.0..=1.0).contains(x)) {
                    log::warn!("clamping out-of-range remote scores in {what}");
                }
                ValueVector::relevance_clamped(entries)
            }
        }
    };
    let scenario_scores = convert(wire.scenario_scores, "scenario")?;
    let action_scores = wire
        .action_scores
        .into_iter()
        .enumerate()
        .map(|(i, s)| convert(s, &format!("action {i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(AssessorResponse {
        scenario_scores,
        action_scores,
        retries: 0,
    })
}

/// Remote assessor endpoint configuration.
#[derive(Debug, Clone)]
pub struct RemoteAssessor {
    pub base_url: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub policy: RangePolicy,
}

impl RemoteAssessor {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            timeout: DEFAULT_TIMEOUT,
            max_retries: DEFAULT_MAX_RETRIES,
            policy: RangePolicy::Strict,
        }
    }

    /// Applies `VALUEPILOT_ASSESSOR_URL` / `VALUEPILOT_ASSESSOR_TIMEOUT_MS`
    /// overrides on top of the given defaults.
    pub fn from_env(default_url: &str) -> Result<Self> {
        let mut remote = Self::new(
            std::env::var(ENV_ENDPOINT).unwrap_or_else(|_| default_url.to_string()),
        );
        if let Ok(ms) = std::env::var(ENV_TIMEOUT_MS) {
            let ms: u64 = ms
                .parse()
                .map_err(|_| Error::Config(format!("{ENV_TIMEOUT_MS} must be an integer, got {ms}")))?;
            remote.timeout = Duration::from_millis(ms);
        }
        Ok(remote)
    }

    pub fn endpoint(&self) -> String {
        format!("{}/{PROTOCOL_VERSION}", self.base_url.trim_end_matches('/'))
    }

    /// One request/response round trip with retries and jittered backoff.
    pub fn roundtrip(&self, request: &AssessorRequest) -> Result<AssessorResponse> {
        request.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| Error::Remote {
                retries: 0,
                message: format!("client construction failed: {e}"),
            })?;
        let body = encode_request(request);
        let url = self.endpoint();
        let mut rng = rand::thread_rng();
        let mut last_error = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                let base = 100u64 << (attempt - 1);
                let jitter = rng.gen_range(0..base / 2 + 1);
                std::thread::sleep(Duration::from_millis(base + jitter));
            }
            let sent = client
                .post(&url)
                .header("content-type", "application/json")
                .body(body.clone())
                .send();
            match sent {
                Err(e) => last_error = format!("transport: {e}"),
                Ok(resp) => {
                    let status = resp.status();
                    if !status.is_success() {
                        last_error = format!("status {status}");
                        continue;
                    }
                    let text = resp.text().map_err(|e| Error::Remote {
                        retries: attempt,
                        message: format!("body read failed: {e}"),
                    })?;
                    let mut parsed = parse_response(
                        &text,
                        request.dimension_set.len(),
                        request.action_texts.len(),
                        self.policy,
                    )
                    .map_err(|e| match e {
                        Error::Remote { message, .. } => Error::Remote {
                            retries: attempt,
                            message,
                        },
                        other => other,
                    })?;
                    parsed.retries = attempt;
                    return Ok(parsed);
                }
            }
        }
        Err(Error::Remote {
            retries: self.max_retries,
            message: last_error,
        })
    }
}

/// Where relevance scores come from.
#[derive(Debug)]
pub enum ScoreSource<'a> {
    /// Pass stored corpus scores through verbatim.
    Annotations(&'a CorpusFile),
    /// Call a remote model server.
    Remote(RemoteAssessor),
    /// Fill every score with a constant (default 0).
    Constant(f64),
}

/// Resolves a request against the configured source.
pub fn assess(request: &AssessorRequest, source: &ScoreSource<'_>) -> Result<AssessorResponse> {
    request.validate()?;
    match source {
        ScoreSource::Constant(fill) => {
            let m = request.dimension_set.len();
            Ok(AssessorResponse {
                scenario_scores: ValueVector::filled(m, *fill),
                action_scores: vec![ValueVector::filled(m, *fill); request.action_texts.len()],
                retries: 0,
            })
        }
        ScoreSource::Annotations(corpus) => {
            let id = request.scenario_id.as_deref().ok_or_else(|| {
                Error::Config("annotation source requires a scenario id".into())
            })?;
            let scenario = corpus.scenario(id).ok_or_else(|| {
                Error::Config(format!("scenario \"{id}\" not found in corpus"))
            })?;
            Ok(AssessorResponse {
                scenario_scores: scenario.relevance.clone(),
                action_scores: scenario.actions.iter().map(|a| a.relevance.clone()).collect(),
                retries: 0,
            })
        }
        ScoreSource::Remote(remote) => remote.roundtrip(request),
    }
}
