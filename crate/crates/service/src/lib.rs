//! HTTP API around [`ericson_core::agent::Agent`].

mod config;
mod error;
mod metrics;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use ericson_core::agent::{Agent, AgentResponse};
use ericson_core::dialogue::{Session, SessionId};
use ericson_core::logger::{SessionSummary, TurnRecord};
use ericson_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub use config::ServiceConfig;
pub use error::ServiceError;
pub use metrics::{percentile, Metrics, MetricsSnapshot, LATENCY_WINDOW};

pub type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as i64)
    })
}

type SessionSlot = Arc<tokio::sync::Mutex<Session>>;

struct Inner {
    agent: Agent,
    sessions: Mutex<HashMap<SessionId, SessionSlot>>,
    metrics: Mutex<Metrics>,
    idle_timeout_ms: i64,
    clock: Clock,
}

/// Shared state behind every handler.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl AppState {
    pub fn new(agent: Agent, idle_timeout: Duration, clock: Clock) -> Result<Self, ServiceError> {
        if agent.log().is_none() {
            return Err(ServiceError::Config(
                "the service needs a dialogue log".into(),
            ));
        }
        Ok(Self {
            inner: Arc::new(Inner {
                agent,
                sessions: Mutex::new(HashMap::new()),
                metrics: Mutex::new(Metrics::default()),
                idle_timeout_ms: idle_timeout.as_millis() as i64,
                clock,
            }),
        })
    }

    pub fn agent(&self) -> &Agent {
        &self.inner.agent
    }

    fn now(&self) -> i64 {
        (self.inner.clock)()
    }

    fn slot(&self, id: &str) -> Result<SessionSlot, ServiceError> {
        let id: SessionId = id
            .parse()
            .map_err(|_| CoreError::NotFound(format!("session {id}")))?;
        if let Some(slot) = lock(&self.inner.sessions).get(&id) {
            return Ok(slot.clone());
        }
        let log = self.inner.agent.log().expect("checked at construction");
        Err(match log.is_finalized(&id) {
            Some(true) => CoreError::Conflict(format!("session {id} is finalized")),
            _ => CoreError::NotFound(format!("session {id}")),
        }
        .into())
    }

    pub fn create_session(&self) -> Result<SessionId, ServiceError> {
        let session = self.inner.agent.create_session(None, self.now())?;
        let id = session.id.clone();
        lock(&self.inner.sessions).insert(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
        lock(&self.inner.metrics).session_created();
        Ok(id)
    }

    /// Runs one turn. Requests for the same session queue on its lock and
    /// run in arrival order.
    pub async fn utterance(&self, id: &str, text: String) -> Result<AgentResponse, ServiceError> {
        let mut guard = self.slot(id)?.lock_owned().await;
        let state = self.clone();
        let response = tokio::task::spawn_blocking(move || {
            let now = state.now();
            state.inner.agent.process_utterance(&mut guard, &text, now)
        })
        .await
        .map_err(|e| ServiceError::Worker(e.to_string()))??;
        let mut metrics = lock(&self.inner.metrics);
        metrics.turn(response.latency_ms, response.error.is_some());
        if let Some(e) = response.log_error {
            metrics.log_failure();
            return Err(ServiceError::LogUnavailable(e));
        }
        Ok(response)
    }

    pub async fn rate(
        &self,
        id: &str,
        rating: Option<u8>,
        feedback: Option<String>,
    ) -> Result<SessionSummary, ServiceError> {
        let slot = self.slot(id)?;
        let mut session = slot.lock().await;
        let already = session.finalized;
        let summary = self
            .inner
            .agent
            .finalize(&mut session, rating, feedback, self.now())?
            .expect("service agents always log");
        if !already {
            lock(&self.inner.metrics).session_finalized(false);
        }
        Ok(summary)
    }

    pub fn session_log(&self, id: &str) -> Result<SessionLogBody, ServiceError> {
        let id: SessionId = id
            .parse()
            .map_err(|_| CoreError::NotFound(format!("session {id}")))?;
        let log = self.inner.agent.log().expect("checked at construction");
        let turns = log.session_turns(&id)?;
        let summary = log
            .summary(&id)
            .ok_or_else(|| CoreError::NotFound(format!("session {id}")))?;
        Ok(SessionLogBody {
            finalized: log.is_finalized(&id).unwrap_or(false),
            session_id: id,
            summary,
            turns,
        })
    }

    pub fn metrics(&self) -> MetricsSnapshot {
        lock(&self.inner.metrics).snapshot()
    }

    /// Finalizes sessions idle past the timeout and drops them from memory.
    /// Sessions busy with a request are left for the next sweep.
    pub fn expire_idle(&self) -> usize {
        let now = self.now();
        let slots: Vec<(SessionId, SessionSlot)> = lock(&self.inner.sessions)
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut expired = 0;
        for (id, slot) in slots {
            let Ok(mut session) = slot.try_lock() else {
                continue;
            };
            if now - session.last_active_ms < self.inner.idle_timeout_ms {
                continue;
            }
            if !session.finalized {
                match self.inner.agent.finalize(&mut session, None, None, now) {
                    Ok(_) => lock(&self.inner.metrics).session_finalized(true),
                    Err(e) => {
                        tracing::warn!(session = %id, error = %e, "could not finalize idle session");
                        continue;
                    }
                }
            }
            lock(&self.inner.sessions).remove(&id);
            expired += 1;
        }
        expired
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: SessionId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtteranceRequest {
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatingRequest {
    pub rating: Option<u8>,
    #[serde(default)]
    pub feedback: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionLogBody {
    pub session_id: SessionId,
    pub finalized: bool,
    pub summary: SessionSummary,
    pub turns: Vec<TurnRecord>,
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create_session(
    State(state): State<AppState>,
) -> Result<(StatusCode, Json<CreatedSession>), ServiceError> {
    let session_id = state.create_session()?;
    Ok((StatusCode::CREATED, Json(CreatedSession { session_id })))
}

async fn post_utterance(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<UtteranceRequest>, JsonRejection>,
) -> Result<Json<AgentResponse>, ServiceError> {
    let Json(body) = body?;
    state.utterance(&id, body.text).await.map(Json)
}

async fn post_rating(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RatingRequest>, JsonRejection>,
) -> Result<Json<SessionSummary>, ServiceError> {
    let Json(body) = body?;
    state.rate(&id, body.rating, body.feedback).await.map(Json)
}

async fn get_log(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionLogBody>, ServiceError> {
    state.session_log(&id).map(Json)
}

async fn get_metrics(State(state): State<AppState>) -> Json<MetricsSnapshot> {
    Json(state.metrics())
}

pub fn router(state: AppState, cors: bool) -> Router {
    let app = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/utterances", post(post_utterance))
        .route("/sessions/{id}/rating", post(post_rating))
        .route("/sessions/{id}/log", get(get_log))
        .route("/metrics", get(get_metrics))
        .with_state(state);
    if cors {
        app.layer(CorsLayer::permissive())
    } else {
        app
    }
}

/// Loads the agent and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let agent_config = config.agent.clone();
    let agent = tokio::task::spawn_blocking(move || Agent::load(agent_config))
        .await
        .map_err(|e| ServiceError::Worker(e.to_string()))??;
    let idle = Duration::from_secs(config.idle_timeout_secs);
    let state = AppState::new(agent, idle, system_clock())?;
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(30).min(idle));
        loop {
            tick.tick().await;
            let n = sweeper.expire_idle();
            if n > 0 {
                tracing::info!(expired = n, "idle sessions finalized");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(&config.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state, config.cors))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
