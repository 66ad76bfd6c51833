//! HTTP session API used by the study front end.
//!
//! Every transition is appended to the session log before the response is
//! sent. Requests against one session are serialised by its lock; distinct
//! sessions proceed independently.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use trustplan::harness::session::Event;
use trustplan::harness::{
    Choice, Clock, Condition, Experiment, LogLine, Session, SessionError, SessionStore, SystemClock,
};
use trustplan::supervisor::Questionnaire;

pub struct AppState {
    exp: Arc<Experiment>,
    store: SessionStore,
    clock: Arc<dyn Clock>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    pub fn new(exp: Experiment, store: SessionStore) -> AppState {
        AppState::with_clock(exp, store, Arc::new(SystemClock))
    }

    pub fn with_clock(exp: Experiment, store: SessionStore, clock: Arc<dyn Clock>) -> AppState {
        AppState {
            exp: Arc::new(exp),
            store,
            clock,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    fn log(&self, session: &str, events: &[Event]) -> Result<(), ApiError> {
        let lines: Vec<LogLine> = events
            .iter()
            .map(|e| LogLine::new(self.clock.now_millis(), session, e))
            .collect();
        self.store.append(&lines).map_err(ApiError::internal)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn internal(e: impl std::fmt::Display) -> ApiError {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> ApiError {
        match &e {
            SessionError::Conflict { action, phase } => ApiError {
                detail: json!({"action": action, "phase": phase}),
                ..ApiError::new(StatusCode::CONFLICT, "conflict", e.to_string())
            },
            SessionError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string()),
            SessionError::Validation(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", e.to_string())
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"code": self.code, "message": self.message, "detail": self.detail});
        (self.status, Json(body)).into_response()
    }
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", e.to_string()))
}

type ApiResult = Result<Response, ApiError>;

fn ok(value: impl serde::Serialize) -> ApiResult {
    Ok(Json(serde_json::to_value(value).map_err(ApiError::internal)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    condition: String,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiceBody {
    choice: Choice,
}

async fn create(State(app): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: CreateBody = body(&bytes)?;
    let condition: Condition = req
        .condition
        .parse()
        .map_err(|e: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", e))?;
    let uuid = uuid::Uuid::new_v4();
    let id = uuid.to_string();
    let seed = req.seed.unwrap_or(uuid.as_u64_pair().0);
    let (session, events) = Session::create(id.clone(), condition, seed, &app.exp);
    let view = session.view(&app.exp);
    app.store
        .index(&json!({"session": id, "condition": condition, "created": app.clock.now_millis()}))
        .map_err(ApiError::internal)?;
    app.log(&id, &events)?;
    app.sessions
        .lock()
        .expect("session table lock")
        .insert(id, Arc::new(Mutex::new(session)));
    let mut resp = ok(view)?;
    *resp.status_mut() = StatusCode::CREATED;
    Ok(resp)
}

/// Runs one transition under the session lock and logs its events.
fn transition<T>(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session, &Experiment) -> Result<(T, Vec<Event>), SessionError>,
) -> Result<T, ApiError> {
    let handle = app.session(id)?;
    let mut session = handle.lock().expect("session lock");
    let (out, events) = f(&mut session, &app.exp)?;
    app.log(id, &events)?;
    Ok(out)
}

async fn round(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = app.session(&id)?;
    let view = handle.lock().expect("session lock").view(&app.exp);
    ok(view)
}

async fn choice(State(app): State<Arc<AppState>>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let req: ChoiceBody = body(&bytes)?;
    ok(transition(&app, &id, |s, exp| {
        let events = s.choose(req.choice, exp)?;
        Ok((s.view(exp), events))
    })?)
}

async fn step(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    ok(transition(&app, &id, |s, exp| s.next_step(exp))?)
}

async fn stop(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    ok(transition(&app, &id, |s, exp| {
        let events = s.stop(exp)?;
        Ok((s.view(exp), events))
    })?)
}

async fn questionnaire(State(app): State<Arc<AppState>>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let q: Questionnaire = body(&bytes)?;
    ok(transition(&app, &id, |s, exp| {
        let events = s.questionnaire(q, exp)?;
        Ok((s.view(exp), events))
    })?)
}

async fn summary(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = app.session(&id)?;
    let summary = handle.lock().expect("session lock").summary();
    ok(summary)
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/round", get(round))
        .route("/sessions/{id}/choice", post(choice))
        .route("/sessions/{id}/step", get(step))
        .route("/sessions/{id}/stop", post(stop))
        .route("/sessions/{id}/questionnaire", post(questionnaire))
        .route("/sessions/{id}/summary", get(summary))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
