//! Inference-client contract tests against the bundled mock server.

use std::time::Duration;

use medharness_core::inference::mock::{MockReply, MockServer};
use medharness_core::inference::{
    batch_eval, complete, ApiStyle, DecodeParams, EndpointConfig, InferenceError,
};
use medharness_core::prompt::PromptText;

fn endpoint(server: &MockServer) -> EndpointConfig {
    EndpointConfig {
        base_url: server.base_url(),
        api_style: ApiStyle::Chat,
        model_name: "mock-model".into(),
        auth_token: None,
        timeout: Duration::from_secs(5),
        max_retries: 3,
        parallelism: 4,
        backoff_base: Duration::from_millis(1),
    }
}

fn prompt(text: &str) -> PromptText {
    PromptText {
        text: text.into(),
        template_id: "cmexam-zh-v1".into(),
        shot_count: 0,
        subject: None,
    }
}

#[test]
fn echo_fixture_returns_text() {
    let server = MockServer::fixed("B").unwrap();
    let raw = complete(&endpoint(&server), &prompt("题目"), &DecodeParams::default()).unwrap();
    assert_eq!(raw, "B");
    assert_eq!(server.request_count(), 1);
}

#[test]
fn completion_style_uses_text_field() {
    let server = MockServer::start(|req, _| MockReply::Text(format!("echo:{}", req.prompt))).unwrap();
    let mut config = endpoint(&server);
    config.api_style = ApiStyle::Completion;
    let raw = complete(&config, &prompt("你好"), &DecodeParams::default()).unwrap();
    assert_eq!(raw, "echo:你好");
}

#[test]
fn two_500s_then_success_retries_through() {
    let server = MockServer::start(|_, seq| {
        if seq < 2 {
            MockReply::Status(500, "boom".into())
        } else {
            MockReply::Text("B".into())
        }
    })
    .unwrap();
    let raw = complete(&endpoint(&server), &prompt("题目"), &DecodeParams::default()).unwrap();
    assert_eq!(raw, "B");
    // Two failures plus the successful retry.
    assert_eq!(server.request_count(), 3);
}

#[test]
fn retries_exhausted_surfaces_status() {
    let server = MockServer::start(|_, _| MockReply::Status(503, "busy".into())).unwrap();
    let mut config = endpoint(&server);
    config.max_retries = 2;
    let err = complete(&config, &prompt("题目"), &DecodeParams::default()).unwrap_err();
    assert!(matches!(err, InferenceError::HttpStatus { status: 503, .. }), "{err}");
    assert_eq!(server.request_count(), 3);
}

#[test]
fn client_4xx_is_not_retried() {
    let server = MockServer::start(|_, _| MockReply::Status(404, "nope".into())).unwrap();
    let err = complete(&endpoint(&server), &prompt("题目"), &DecodeParams::default()).unwrap_err();
    assert!(matches!(err, InferenceError::HttpStatus { status: 404, .. }), "{err}");
    assert_eq!(server.request_count(), 1);
}

#[test]
fn auth_failure_is_fatal_and_named() {
    let server = MockServer::start(|_, _| MockReply::Status(401, "who are you".into())).unwrap();
    let err = complete(&endpoint(&server), &prompt("题目"), &DecodeParams::default()).unwrap_err();
    assert!(matches!(err, InferenceError::AuthError { status: 401 }), "{err}");
    assert_eq!(server.request_count(), 1);
}

#[test]
fn missing_text_field_is_malformed_response() {
    let server = MockServer::start(|_, _| MockReply::MissingText).unwrap();
    let err = complete(&endpoint(&server), &prompt("题目"), &DecodeParams::default()).unwrap_err();
    assert!(matches!(err, InferenceError::MalformedResponse(_)), "{err}");
}

fn keyed_prompts(n: usize) -> Vec<(String, PromptText)> {
    (0..n)
        .map(|i| (format!("q{i:03}"), prompt(&format!("题目{i:03}"))))
        .collect()
}

#[test]
fn batch_returns_input_order_and_caches() {
    let server = MockServer::start(|req, _| {
        // Answer derives from the prompt so order mix-ups are detectable.
        MockReply::Text(format!("ans-{}", &req.prompt[req.prompt.len() - 3..]))
    })
    .unwrap();
    let cache = tempfile::tempdir().unwrap();
    let prompts = keyed_prompts(10);

    let first = batch_eval(&endpoint(&server), &prompts, &DecodeParams::default(), cache.path())
        .unwrap();
    assert_eq!(first.len(), 10);
    for (i, pred) in first.iter().enumerate() {
        assert_eq!(pred.id, format!("q{i:03}"));
        assert_eq!(pred.raw_output, format!("ans-{i:03}"));
        assert!(!pred.cached);
        assert!(pred.error.is_none());
    }
    assert_eq!(server.request_count(), 10);

    // Second run: all hits, zero network requests.
    let second = batch_eval(&endpoint(&server), &prompts, &DecodeParams::default(), cache.path())
        .unwrap();
    assert_eq!(server.request_count(), 10);
    for (a, b) in first.iter().zip(&second) {
        assert!(b.cached);
        assert_eq!(a.raw_output, b.raw_output);
        assert_eq!(a.prompt_hash, b.prompt_hash);
    }
}

#[test]
fn per_item_failure_does_not_abort_the_batch() {
    let server = MockServer::start(|req, _| {
        if req.prompt.contains("001") {
            MockReply::Status(404, "gone".into())
        } else {
            MockReply::Text("B".into())
        }
    })
    .unwrap();
    let cache = tempfile::tempdir().unwrap();
    let prompts = keyed_prompts(3);

    let preds = batch_eval(&endpoint(&server), &prompts, &DecodeParams::default(), cache.path())
        .unwrap();
    assert_eq!(preds.len(), 3);
    assert!(preds[0].error.is_none());
    assert!(preds[2].error.is_none());
    let failed = &preds[1];
    assert_eq!(failed.raw_output, "");
    assert!(failed.error.as_deref().unwrap().contains("404"));
}

#[test]
fn duplicate_ids_rejected_up_front() {
    let server = MockServer::fixed("B").unwrap();
    let cache = tempfile::tempdir().unwrap();
    let prompts = vec![("a".to_string(), prompt("x")), ("a".to_string(), prompt("y"))];
    let err = batch_eval(&endpoint(&server), &prompts, &DecodeParams::default(), cache.path())
        .unwrap_err();
    assert!(matches!(err, InferenceError::DuplicateId(_)), "{err}");
    assert_eq!(server.request_count(), 0);
}

#[test]
fn parallelism_bound_is_respected() {
    let server = MockServer::start_with_delay(
        |_, _| MockReply::Text("B".into()),
        Duration::from_millis(15),
    )
    .unwrap();
    let cache = tempfile::tempdir().unwrap();
    let prompts = keyed_prompts(24);
    let mut config = endpoint(&server);
    config.parallelism = 4;

    let preds =
        batch_eval(&config, &prompts, &DecodeParams::default(), cache.path()).unwrap();
    assert_eq!(preds.len(), 24);
    assert_eq!(server.request_count(), 24);
    let observed = server.max_concurrent();
    assert!(observed <= 4, "observed concurrency {observed} > bound 4");
    assert!(observed >= 2, "no parallelism observed at all");
}

#[test]
fn cache_entry_with_wrong_prompt_is_a_fatal_collision() {
    use medharness_core::inference::{prompt_hash, write_cached, CacheEntry};

    let server = MockServer::fixed("B").unwrap();
    let cache = tempfile::tempdir().unwrap();
    let config = endpoint(&server);
    let params = DecodeParams::default();
    let wanted = prompt("真正的题目");

    // Forge an entry under this prompt's hash that claims another prompt.
    let hash = prompt_hash(&config.model_name, &wanted.template_id, &wanted.text, &params);
    write_cached(
        cache.path(),
        &CacheEntry {
            prompt_hash: hash,
            model: config.model_name.clone(),
            template_id: wanted.template_id.clone(),
            prompt: "别的题目".into(),
            params: params.clone(),
            raw_output: "C".into(),
        },
    )
    .unwrap();

    let prompts = vec![("q0".to_string(), wanted)];
    let err = batch_eval(&config, &prompts, &params, cache.path()).unwrap_err();
    assert!(matches!(err, InferenceError::HashCollision(_)), "{err}");
}

#[test]
fn bearer_token_is_sent_when_configured() {
    let server = MockServer::start(|req, _| match req.authorization.as_deref() {
        Some("Bearer secret-token") => MockReply::Text("ok".into()),
        _ => MockReply::Status(401, "missing bearer".into()),
    })
    .unwrap();
    let mut config = endpoint(&server);
    config.auth_token = Some("secret-token".into());
    let raw = complete(&config, &prompt("题目"), &DecodeParams::default()).unwrap();
    assert_eq!(raw, "ok");
}
