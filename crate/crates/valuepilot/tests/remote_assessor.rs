//! Round-trip tests for the remote assessor protocol against a minimal
//! in-process HTTP server.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use valuepilot::assessor::{
    assess, AssessorRequest, RangePolicy, RemoteAssessor, ScoreSource, PROTOCOL_VERSION,
};
use valuepilot::{DimensionSet, Error};

/// Serves canned HTTP responses; the first `failures` requests get a 500.
fn spawn_server(failures: usize, body: String) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut buf = vec![0u8; 65536];
            let mut read = 0;
            // read headers, then the declared body length
            loop {
                match stream.read(&mut buf[read..]) {
                    Ok(0) | Err(_) => break,
                    Ok(k) => read += k,
                }
                if let Some(pos) = find_header_end(&buf[..read]) {
                    let headers = String::from_utf8_lossy(&buf[..pos]).to_lowercase();
                    let content_length = headers
                        .lines()
                        .find_map(|l| l.strip_prefix("content-length:"))
                        .and_then(|v| v.trim().parse::<usize>().ok())
                        .unwrap_or(0);
                    if read >= pos + 4 + content_length {
                        break;
                    }
                }
            }
            let n = counter.fetch_add(1, Ordering::SeqCst);
            let response = if n < failures {
                "HTTP/1.1 500 Internal Server Error\r\ncontent-length: 0\r\nconnection: close\r\n\r\n".to_string()
            } else {
                format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                )
            };
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}"), hits)
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n")
}

fn request() -> AssessorRequest {
    AssessorRequest {
        scenario_text: "a quiet evening at home".into(),
        action_texts: vec!["read".into(), "cook".into(), "sleep".into()],
        dimension_set: DimensionSet::default_six(),
        scenario_id: None,
    }
}

fn ok_body() -> String {
    serde_json::json!({
        "version": PROTOCOL_VERSION,
        "scenario_scores": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        "action_scores": [
            [0.1, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.3, 0.0, 0.0, 0.0, 0.0, 0.0]
        ],
    })
    .to_string()
}

#[test]
fn echo_server_roundtrip() {
    let (url, _hits) = spawn_server(0, ok_body());
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    let resp = assess(&request(), &ScoreSource::Remote(remote)).unwrap();
    assert_eq!(resp.retries, 0);
    assert_eq!(resp.action_scores.len(), 3);
    assert_eq!(resp.action_scores[2].entries()[0], 0.3);
}

#[test]
fn retries_then_success_records_retry_count() {
    let (url, hits) = spawn_server(2, ok_body());
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    remote.max_retries = 3;
    let resp = remote.roundtrip(&request()).unwrap();
    assert_eq!(resp.retries, 2);
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn exhausted_retries_is_a_remote_error() {
    let (url, _hits) = spawn_server(usize::MAX, ok_body());
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    remote.max_retries = 1;
    let err = remote.roundtrip(&request()).unwrap_err();
    match err {
        Error::Remote { retries, message } => {
            assert_eq!(retries, 1);
            assert!(message.contains("500"), "{message}");
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn out_of_range_strict_rejects_without_partial_result() {
    let body = serde_json::json!({
        "version": PROTOCOL_VERSION,
        "scenario_scores": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        "action_scores": [
            [1.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        ],
    })
    .to_string();
    let (url, _hits) = spawn_server(0, body);
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    let err = remote.roundtrip(&request()).unwrap_err();
    assert!(err.to_string().contains("action 0"), "{err}");
}

#[test]
fn clamp_policy_admits_rounded_scores() {
    let body = serde_json::json!({
        "version": PROTOCOL_VERSION,
        "scenario_scores": [1.0000001, 0.0, 0.0, 0.0, 0.0, 0.0],
        "action_scores": [
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        ],
    })
    .to_string();
    let (url, _hits) = spawn_server(0, body);
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    remote.policy = RangePolicy::Clamp;
    let resp = remote.roundtrip(&request()).unwrap();
    assert_eq!(resp.scenario_scores.entries()[0], 1.0);
}

use proptest::prelude::Strategy;

proptest::proptest! {
    /// No score outside `[-1, 1]` ever escapes `parse_response`, under
    /// either range policy, for arbitrary well-formed bodies.
    #[test]
    fn fuzzed_responses_never_leak_out_of_range_scores(
        (scenario, actions) in (1usize..8).prop_flat_map(|m| (
            proptest::collection::vec(-3.0f64..3.0, m),
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, m), 0..5),
        )),
        strict in proptest::bool::ANY,
    ) {
        let m = scenario.len();
        let body = serde_json::json!({
            "version": PROTOCOL_VERSION,
            "scenario_scores": scenario,
            "action_scores": actions,
        })
        .to_string();
        let policy = if strict { RangePolicy::Strict } else { RangePolicy::Clamp };
        if let Ok(resp) =
            valuepilot::assessor::parse_response(&body, m, actions.len(), policy)
        {
            let in_range = |v: &valuepilot::ValueVector| {
                v.entries().iter().all(|x| (-1.0..=1.0).contains(x))
            };
            proptest::prop_assert!(in_range(&resp.scenario_scores));
            proptest::prop_assert!(resp.action_scores.iter().all(in_range));
        }
    }
}

#[test]
fn truncated_body_is_a_parse_failure() {
    let (url, _hits) = spawn_server(0, "{\"version\": \"assess/1\", \"scenario_sc".into());
    let mut remote = RemoteAssessor::new(url);
    remote.timeout = Duration::from_secs(2);
    let err = remote.roundtrip(&request()).unwrap_err();
    assert!(matches!(err, Error::Remote { .. }), "{err}");
}
