use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

use trustplan::harness::store::replay_points;
use trustplan::harness::{Experiment, LoadedScenario, SessionStore, StepClock};
use trustplan::planning::SearchLimits;
use trustplan_cli::server::{router, AppState};

struct Api {
    app: Router,
    store: SessionStore,
    _dir: TempDir,
}

fn api() -> Api {
    let limits = SearchLimits::default();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/office/scenario.toml");
    let exp = Experiment::new(LoadedScenario::load(&path, &limits).unwrap(), &limits).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let state = AppState::with_clock(exp, store.clone(), Arc::new(StepClock::starting_at(1_700_000_000_000)));
    Api {
        app: router(Arc::new(state)),
        store,
        _dir: dir,
    }
}

impl Api {
    async fn call(&self, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        let req = req
            .body(body.map(|b| Body::from(b.to_owned())).unwrap_or_else(Body::empty))
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(&body.to_string())).await
    }

    async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    async fn create(&self, condition: &str, seed: u64) -> String {
        let (status, view) = self
            .post("/sessions", json!({"condition": condition, "seed": seed}))
            .await;
        assert_eq!(status, StatusCode::CREATED, "{view}");
        view["session"].as_str().unwrap().to_owned()
    }

    fn kinds(&self, id: &str) -> Vec<String> {
        self.store.read(id).unwrap().into_iter().map(|l| l.kind).collect()
    }
}

fn assert_envelope(body: &Value, code: &str) {
    assert_eq!(body["code"], code, "{body}");
    assert!(body["message"].as_str().is_some_and(|m| !m.is_empty()), "{body}");
    assert!(body.get("detail").is_some(), "{body}");
}

#[tokio::test]
async fn a_monitored_round_end_to_end() {
    let api = api();
    let (status, view) = api
        .post("/sessions", json!({"condition": "always-optimal", "seed": 9}))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(view["round"], 1);
    assert_eq!(view["level"], 1);
    assert_eq!(view["task"], "reach");
    assert_eq!(view["phase"], "await-choice");
    assert!(view["map"].as_str().unwrap().contains('R'));
    let id = view["session"].as_str().unwrap().to_owned();
    assert_eq!(api.kinds(&id), ["created", "round-started"]);

    let (status, round) = api.get(&format!("/sessions/{id}/round")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(round, view);

    let (status, v) = api
        .post(&format!("/sessions/{id}/choice"), json!({"choice": "monitor"}))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["phase"], "watching");
    let len = v["plan_length"].as_u64().unwrap();
    // Cost 8 is five moves plus one rubble crossing at 3.
    assert_eq!(len, 6);

    for i in 1..=3 {
        let (status, step) = api.get(&format!("/sessions/{id}/step")).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(step["step"], i);
        assert_eq!(step["last"], false);
        assert!(step["action"].as_str().unwrap().starts_with("move-"));
        assert_eq!(step["position"].as_array().unwrap().len(), 2);
        // The step is on disk before the client sees it.
        assert_eq!(api.kinds(&id).last().unwrap(), "step");
    }

    let (status, v) = api.post(&format!("/sessions/{id}/stop"), json!({})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["phase"], "await-questionnaire");
    assert_eq!(v["points"], 50);

    let ratings = json!({"predictability": 0.8, "dependability": 0.7, "faith": 0.6, "trust": 0.9});
    let (status, v) = api.post(&format!("/sessions/{id}/questionnaire"), ratings).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((v["round"].as_u64(), v["level"].as_u64()), (Some(2), Some(3)));
    assert_eq!(v["task"], "coffee-lab");

    let (status, s) = api.get(&format!("/sessions/{id}/summary")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["condition"], "always-optimal");
    assert_eq!(s["trust_scalar"], 0.75);
    assert_eq!(s["rounds"][0]["stopped_at"], 3);
    assert_eq!(s["rounds"][0]["ratings"]["faith"], 0.6);

    let log = api.store.read(&id).unwrap();
    assert_eq!(
        log.iter().map(|l| l.kind.as_str()).collect::<Vec<_>>(),
        [
            "created",
            "round-started",
            "choice",
            "step",
            "step",
            "step",
            "stop",
            "outcome",
            "questionnaire",
            "round-started"
        ]
    );
    assert!(log.windows(2).all(|w| w[0].ts < w[1].ts));
    assert!(log.iter().all(|l| l.session == id));
    assert_eq!(replay_points(&log).unwrap(), 50);
}

#[tokio::test]
async fn stepping_past_the_plan_is_not_found() {
    let api = api();
    let id = api.create("always-explicable", 1).await;
    api.post(&format!("/sessions/{id}/choice"), json!({"choice": "monitor"}))
        .await;
    let mut last = Value::Null;
    for _ in 0..10 {
        let (status, step) = api.get(&format!("/sessions/{id}/step")).await;
        assert_eq!(status, StatusCode::OK);
        last = step;
    }
    assert_eq!(last["last"], true);
    let (status, body) = api.get(&format!("/sessions/{id}/step")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_envelope(&body, "not_found");
    let (_, s) = api.get(&format!("/sessions/{id}/summary")).await;
    assert_eq!(s["points"], 100);
}

#[tokio::test]
async fn wrong_phase_requests_conflict_without_logging() {
    let api = api();
    let id = api.create("trust-aware", 2).await;
    let before = api.kinds(&id);

    let (status, body) = api.post(&format!("/sessions/{id}/stop"), json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_envelope(&body, "conflict");
    assert_eq!(body["detail"], json!({"action": "stop", "phase": "await-choice"}));

    let ratings = json!({"predictability": 0.5, "dependability": 0.5, "faith": 0.5, "trust": 0.5});
    let (status, body) = api
        .post(&format!("/sessions/{id}/questionnaire"), ratings.clone())
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_envelope(&body, "conflict");

    let (status, _) = api
        .post(&format!("/sessions/{id}/choice"), json!({"choice": "label"}))
        .await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = api
        .post(&format!("/sessions/{id}/choice"), json!({"choice": "label"}))
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_envelope(&body, "conflict");
    let (status, _) = api.get(&format!("/sessions/{id}/step")).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let mut expected = before;
    expected.extend(["choice".to_owned(), "outcome".to_owned()]);
    assert_eq!(api.kinds(&id), expected);
}

#[tokio::test]
async fn malformed_bodies_are_rejected() {
    let api = api();
    for body in [
        json!({"condition": "sometimes"}),
        json!({"seed": 3}),
        json!({"condition": "random", "extra": true}),
    ] {
        let (status, resp) = api.post("/sessions", body).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_envelope(&resp, "invalid_request");
    }
    let (status, resp) = api.call(Method::POST, "/sessions", Some("{not json")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_envelope(&resp, "invalid_request");

    let id = api.create("random", 5).await;
    let (status, resp) = api
        .post(&format!("/sessions/{id}/choice"), json!({"choice": "nap"}))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_envelope(&resp, "invalid_request");

    api.post(&format!("/sessions/{id}/choice"), json!({"choice": "label"}))
        .await;
    for ratings in [
        json!({"predictability": 1.5, "dependability": 0.5, "faith": 0.5, "trust": 0.5}),
        json!({"predictability": 0.5, "dependability": 0.5, "faith": 0.5}),
    ] {
        let (status, resp) = api.post(&format!("/sessions/{id}/questionnaire"), ratings).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_envelope(&resp, "invalid_request");
    }
    let (_, v) = api.get(&format!("/sessions/{id}/round")).await;
    assert_eq!(v["phase"], "await-questionnaire");
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let api = api();
    for (method, path) in [
        (Method::GET, "round"),
        (Method::GET, "step"),
        (Method::GET, "summary"),
        (Method::POST, "stop"),
    ] {
        let (status, body) = api.call(method, &format!("/sessions/nope/{path}"), Some("{}")).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{path}");
        assert_envelope(&body, "not_found");
    }
}

#[tokio::test]
async fn sessions_are_indexed_and_isolated() {
    let api = api();
    let a = api.create("always-optimal", 1).await;
    let b = api.create("always-explicable", 1).await;
    assert_ne!(a, b);
    api.post(&format!("/sessions/{a}/choice"), json!({"choice": "label"}))
        .await;
    let (_, vb) = api.get(&format!("/sessions/{b}/round")).await;
    assert_eq!(vb["phase"], "await-choice");

    let index = std::fs::read_to_string(api.store.dir().join("index.jsonl")).unwrap();
    let entries: Vec<Value> = index.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["session"], a.as_str());
    assert_eq!(entries[1]["condition"], "always-explicable");
}
