//! HTTP service over the pipeline. Sessions live in memory and are
//! snapshotted to disk on every change when a data directory is set. Solves
//! run as background jobs on a bounded worker pool and are polled.
//!
//! Endpoints (JSON unless noted):
//!
//! | method | path | purpose |
//! |---|---|---|
//! | GET | `/health` | liveness, no token needed |
//! | POST | `/sessions` | create from condition TOML + wish CSV |
//! | GET | `/sessions` | list sessions |
//! | GET | `/sessions/{id}` | phase, revision, running job, intake warnings |
//! | POST | `/sessions/{id}/probe` | start a probe job |
//! | POST | `/sessions/{id}/probe/acknowledge` | allow the night stage despite conflicts |
//! | POST | `/sessions/{id}/night` | start a night solve job |
//! | POST | `/sessions/{id}/edits` | apply cell edits at a given revision |
//! | POST | `/sessions/{id}/postprocess` | place 12h before night starts |
//! | POST | `/sessions/{id}/day` | start a day solve job |
//! | POST | `/sessions/{id}/finalize` | close the session |
//! | GET | `/sessions/{id}/roster?format=json\|csv` | current roster |
//! | GET | `/sessions/{id}/audit` | edit log |
//! | GET | `/sessions/{id}/reports/{probe\|night\|day\|feedback\|final}` | reports |
//! | GET | `/sessions/{id}/export/instance?stage=&format=lp\|mps` | model text |
//! | GET | `/jobs/{id}` | job status, incumbent and trace |
//!
//! Wrong phase, stale revision or a running job answer 409; unknown ids 404.

pub mod store;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Semaphore;

use crate::domain::Stage;
use crate::encoder::lp::ModelFormat;
use crate::error::Error;
use crate::io::{self, RosterFormat, SymbolMap};
use crate::pipeline::{CellEdit, Phase, Session, SolverChoice};
use crate::solver::{Fixing, HeuristicOptions, ProbeEngine, TracePoint};
pub use store::SnapshotStore;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub data_dir: Option<PathBuf>,
    pub token: Option<String>,
    /// Concurrent solve jobs.
    pub workers: usize,
}

impl ServiceConfig {
    /// Reads `ROSTRA_DATA_DIR`, `ROSTRA_TOKEN` and `ROSTRA_WORKERS`.
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        ServiceConfig {
            data_dir: var("ROSTRA_DATA_DIR").map(PathBuf::from),
            token: var("ROSTRA_TOKEN"),
            workers: var("ROSTRA_WORKERS").and_then(|v| v.parse().ok()).unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JobKind {
    Probe,
    NightSolve,
    DaySolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JobStatus {
    Queued,
    Running,
    Succeeded,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobHandle {
    pub id: String,
    pub session: String,
    pub kind: JobKind,
    pub status: JobStatus,
    pub elapsed_s: f64,
    /// Best objective seen so far (soft objective plus weighted hard excess).
    pub incumbent: Option<f64>,
    pub trace: Vec<TracePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

struct Entry {
    session: Session,
    running: Option<String>,
}

struct Inner {
    sessions: Mutex<BTreeMap<String, Arc<Mutex<Entry>>>>,
    jobs: Mutex<BTreeMap<String, Arc<Mutex<JobHandle>>>>,
    store: Option<SnapshotStore>,
    token: Option<String>,
    pool: Arc<Semaphore>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Builds the state, reloading any snapshots found in the data directory.
    pub fn new(cfg: ServiceConfig) -> crate::Result<Self> {
        let store = cfg.data_dir.map(SnapshotStore::open).transpose()?;
        let mut sessions = BTreeMap::new();
        if let Some(st) = &store {
            for s in st.load_all()? {
                sessions.insert(s.id.clone(), Arc::new(Mutex::new(Entry { session: s, running: None })));
            }
        }
        Ok(AppState(Arc::new(Inner {
            sessions: Mutex::new(sessions),
            jobs: Mutex::new(BTreeMap::new()),
            store,
            token: cfg.token,
            pool: Arc::new(Semaphore::new(cfg.workers.max(1))),
        })))
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ApiError> {
        self.0.sessions.lock().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }

    fn snapshot(&self, s: &Session) {
        if let Some(st) = &self.0.store {
            if let Err(e) = st.save(s) {
                tracing::error!("snapshot of session {} failed: {e}", s.id);
            }
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} {id}"))
    }

    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::WrongPhase { .. } | Error::ProbeFailed(_) => StatusCode::CONFLICT,
            Error::SolverNotFound | Error::SolverOutput(_) | Error::ObjectiveMismatch { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
            Error::Io { .. } | Error::IoBare(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn auth(State(st): State<AppState>, req: Request, next: Next) -> Response {
    if let Some(tok) = &st.0.token {
        let ok = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .is_some_and(|v| v == tok);
        if !ok && req.uri().path() != "/health" {
            return ApiError::new(StatusCode::UNAUTHORIZED, "missing or wrong bearer token").into_response();
        }
    }
    next.run(req).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/probe", post(start_probe))
        .route("/sessions/{id}/probe/acknowledge", post(acknowledge_probe))
        .route("/sessions/{id}/night", post(start_night))
        .route("/sessions/{id}/edits", post(submit_edits))
        .route("/sessions/{id}/postprocess", post(postprocess))
        .route("/sessions/{id}/day", post(start_day))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/sessions/{id}/roster", get(get_roster))
        .route("/sessions/{id}/audit", get(get_audit))
        .route("/sessions/{id}/reports/{kind}", get(get_report))
        .route("/sessions/{id}/export/instance", get(export_instance))
        .route("/jobs/{id}", get(get_job))
        .layer(middleware::from_fn_with_state(state.clone(), auth))
        .with_state(state)
}

/// Binds and serves until the process is stopped.
pub async fn serve(addr: &str, cfg: ServiceConfig) -> crate::Result<()> {
    let state = AppState::new(cfg)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    /// Condition file (TOML).
    pub condition: String,
    /// Wish grid (CSV).
    pub wishes: String,
    #[serde(default)]
    pub symbol_map: SymbolMap,
    /// Optional session id; a random one otherwise.
    #[serde(default)]
    pub id: Option<String>,
}

fn summary(e: &Entry) -> Value {
    let s = &e.session;
    json!({
        "id": s.id,
        "phase": s.phase,
        "revision": s.revision,
        "running_job": e.running,
        "intake_warnings": s.intake_warnings,
        "probe_acknowledged": s.probe_acknowledged,
    })
}

async fn create_session(State(st): State<AppState>, Json(req): Json<CreateSession>) -> ApiResult<(StatusCode, Json<Value>)> {
    let (cfg, mut warnings) = io::load_condition_file(&req.condition)?;
    let (wishes, w2) = io::load_wish_table(&req.wishes, &cfg, &req.symbol_map)?;
    warnings.extend(w2);
    let id = req.id.unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "session id must be [A-Za-z0-9_-]+"));
    }
    let mut s = Session::new(id.clone(), cfg, wishes)?;
    s.intake_warnings = warnings;
    let entry = Entry { session: s, running: None };
    let body = summary(&entry);
    {
        let mut map = st.0.sessions.lock().unwrap();
        if map.contains_key(&id) {
            return Err(ApiError::conflict(format!("session {id} exists")));
        }
        st.snapshot(&entry.session);
        map.insert(id, Arc::new(Mutex::new(entry)));
    }
    Ok((StatusCode::CREATED, Json(body)))
}

async fn list_sessions(State(st): State<AppState>) -> Json<Value> {
    let entries: Vec<Arc<Mutex<Entry>>> = st.0.sessions.lock().unwrap().values().cloned().collect();
    Json(Value::Array(entries.iter().map(|e| summary(&e.lock().unwrap())).collect()))
}

async fn get_session(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let e = st.entry(&id)?;
    let body = summary(&e.lock().unwrap());
    Ok(Json(body))
}

fn idle(e: &Entry) -> ApiResult<()> {
    match &e.running {
        Some(j) => Err(ApiError::conflict(format!("job {j} is running on this session (phase {})", e.session.phase))),
        None => Ok(()),
    }
}

/// Runs a session mutation under the lock, bumping and snapshotting on success.
fn mutate<T>(st: &AppState, id: &str, f: impl FnOnce(&mut Session) -> crate::Result<T>) -> ApiResult<T> {
    let e = st.entry(id)?;
    let mut e = e.lock().unwrap();
    idle(&e)?;
    let out = f(&mut e.session)?;
    st.snapshot(&e.session);
    Ok(out)
}

async fn acknowledge_probe(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let rev = mutate(&st, &id, |s| {
        s.acknowledge_probe();
        Ok(s.revision)
    })?;
    Ok(Json(json!({ "revision": rev })))
}

#[derive(Debug, Deserialize)]
pub struct EditRequest {
    pub revision: u64,
    pub edits: Vec<CellEdit>,
    #[serde(default)]
    pub at: Option<String>,
}

async fn submit_edits(State(st): State<AppState>, Path(id): Path<String>, Json(req): Json<EditRequest>) -> ApiResult<Json<Value>> {
    let e = st.entry(&id)?;
    let mut e = e.lock().unwrap();
    idle(&e)?;
    if e.session.revision != req.revision {
        return Err(ApiError::conflict(format!(
            "stale revision {}; the session is at {} (phase {})",
            req.revision, e.session.revision, e.session.phase
        )));
    }
    let warnings = e.session.apply_edits(&req.edits, req.at)?;
    st.snapshot(&e.session);
    Ok(Json(json!({ "revision": e.session.revision, "phase": e.session.phase, "warnings": warnings })))
}

async fn postprocess(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let (rev, rep) = mutate(&st, &id, |s| {
        let rep = s.post_process_longday()?.clone();
        Ok((s.revision, rep))
    })?;
    Ok(Json(json!({ "revision": rev, "report": rep })))
}

async fn finalize(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let rev = mutate(&st, &id, |s| {
        s.finalize()?;
        Ok(s.revision)
    })?;
    Ok(Json(json!({ "revision": rev, "phase": Phase::Finalized })))
}

#[derive(Debug, Deserialize, Default)]
pub struct SolveRequest {
    #[serde(default)]
    pub solver: Option<SolverChoice>,
}

#[derive(Debug, Deserialize, Default)]
pub struct ProbeRequest {
    #[serde(default)]
    pub stage: Option<Stage>,
    #[serde(default)]
    pub fixings: Vec<Fixing>,
    #[serde(default)]
    pub engine: Option<ProbeEngine>,
}

fn default_solver() -> SolverChoice {
    SolverChoice::Heuristic(HeuristicOptions::default())
}

enum JobWork {
    Probe(ProbeRequest),
    Solve(Stage, SolverChoice),
}

/// Checks the phase, marks the session busy and queues the work.
fn start_job(st: &AppState, id: &str, kind: JobKind, work: JobWork) -> ApiResult<JobHandle> {
    let e = st.entry(id)?;
    let job_id = uuid::Uuid::new_v4().simple().to_string();
    let session = {
        let mut g = e.lock().unwrap();
        idle(&g)?;
        match &work {
            JobWork::Probe(p) => {
                g.session.stage_input(p.stage.unwrap_or(Stage::Night))?;
            }
            JobWork::Solve(stage, _) => g.session.check_ready(*stage)?,
        }
        g.running = Some(job_id.clone());
        g.session.clone()
    };
    let handle = JobHandle {
        id: job_id.clone(),
        session: id.to_string(),
        kind,
        status: JobStatus::Queued,
        elapsed_s: 0.0,
        incumbent: None,
        trace: Vec::new(),
        error: None,
        result: None,
    };
    let job = Arc::new(Mutex::new(handle.clone()));
    st.0.jobs.lock().unwrap().insert(job_id, job.clone());
    let st2 = st.clone();
    tokio::spawn(async move {
        let _permit = st2.0.pool.clone().acquire_owned().await;
        job.lock().unwrap().status = JobStatus::Running;
        let j2 = job.clone();
        let outcome = tokio::task::spawn_blocking(move || run_work(session, work, &j2)).await;
        let mut g = e.lock().unwrap();
        g.running = None;
        let mut h = job.lock().unwrap();
        match outcome {
            Ok(Ok((session, result))) => {
                g.session = session;
                st2.snapshot(&g.session);
                h.status = JobStatus::Succeeded;
                h.result = Some(result);
            }
            Ok(Err(err)) => {
                h.status = JobStatus::Failed;
                h.error = Some(err.to_string());
            }
            Err(join) => {
                h.status = JobStatus::Failed;
                h.error = Some(format!("job panicked: {join}"));
            }
        }
    });
    Ok(handle)
}

fn run_work(mut s: Session, work: JobWork, job: &Arc<Mutex<JobHandle>>) -> crate::Result<(Session, Value)> {
    let t0 = Instant::now();
    let progress = |p: &TracePoint| {
        let mut h = job.lock().unwrap();
        h.elapsed_s = t0.elapsed().as_secs_f64();
        h.incumbent = Some(p.cost);
        h.trace.push(p.clone());
    };
    let result = match work {
        JobWork::Probe(p) => {
            let engine = p.engine.unwrap_or_else(|| match default_solver() {
                SolverChoice::Heuristic(o) => ProbeEngine::Heuristic(o),
                SolverChoice::Exact(o) => ProbeEngine::Exact(o),
            });
            serde_json::to_value(s.probe(p.stage.unwrap_or(Stage::Night), &p.fixings, &engine)?)?
        }
        JobWork::Solve(stage, solver) => {
            let sol = match stage {
                Stage::Night => s.run_night(&solver, Some(&progress))?.clone(),
                Stage::Day => s.run_day(&solver, Some(&progress))?.clone(),
            };
            {
                // exact solves report their trace only at the end
                let mut h = job.lock().unwrap();
                if h.trace.is_empty() {
                    h.trace = sol.report.trace.clone();
                    h.incumbent = sol.report.trace.last().map(|p| p.cost);
                }
                h.elapsed_s = t0.elapsed().as_secs_f64();
            }
            let feedback = s.feedback(stage).unwrap_or_default();
            json!({ "report": sol.report, "breakdown": sol.breakdown, "hard_records": sol.hard_records, "feedback": feedback })
        }
    };
    Ok((s, result))
}

async fn start_probe(State(st): State<AppState>, Path(id): Path<String>, body: Option<Json<ProbeRequest>>) -> ApiResult<(StatusCode, Json<JobHandle>)> {
    let req = body.map(|b| b.0).unwrap_or_default();
    Ok((StatusCode::ACCEPTED, Json(start_job(&st, &id, JobKind::Probe, JobWork::Probe(req))?)))
}

async fn start_night(State(st): State<AppState>, Path(id): Path<String>, body: Option<Json<SolveRequest>>) -> ApiResult<(StatusCode, Json<JobHandle>)> {
    let solver = body.and_then(|b| b.0.solver).unwrap_or_else(default_solver);
    Ok((StatusCode::ACCEPTED, Json(start_job(&st, &id, JobKind::NightSolve, JobWork::Solve(Stage::Night, solver))?)))
}

async fn start_day(State(st): State<AppState>, Path(id): Path<String>, body: Option<Json<SolveRequest>>) -> ApiResult<(StatusCode, Json<JobHandle>)> {
    let solver = body.and_then(|b| b.0.solver).unwrap_or_else(default_solver);
    Ok((StatusCode::ACCEPTED, Json(start_job(&st, &id, JobKind::DaySolve, JobWork::Solve(Stage::Day, solver))?)))
}

async fn get_job(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<JobHandle>> {
    let job = st.0.jobs.lock().unwrap().get(&id).cloned().ok_or_else(|| ApiError::not_found("job", &id))?;
    let h = job.lock().unwrap().clone();
    Ok(Json(h))
}

#[derive(Debug, Deserialize)]
pub struct FormatQuery {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub stage: Option<Stage>,
}

async fn get_roster(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<FormatQuery>) -> ApiResult<Response> {
    let e = st.entry(&id)?;
    let g = e.lock().unwrap();
    let fmt: RosterFormat = q.format.as_deref().unwrap_or("json").parse()?;
    let text = io::export_roster(g.session.current_roster(), fmt)?;
    let ctype = match fmt {
        RosterFormat::GridCsv => "text/csv; charset=utf-8",
        RosterFormat::StructuredJson => "application/json",
    };
    Ok(([(header::CONTENT_TYPE, ctype)], [("x-rostra-phase", g.session.phase.to_string())], text).into_response())
}

async fn get_audit(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let e = st.entry(&id)?;
    let g = e.lock().unwrap();
    Ok(Json(json!({ "audit": g.session.audit, "current_from": g.session.audit_start })))
}

async fn get_report(State(st): State<AppState>, Path((id, kind)): Path<(String, String)>, Query(q): Query<FormatQuery>) -> ApiResult<Response> {
    let e = st.entry(&id)?;
    let g = e.lock().unwrap();
    let s = &g.session;
    let missing = |what: &str| ApiError::conflict(format!("no {what} yet (phase {})", s.phase));
    let body = match kind.as_str() {
        "probe" => serde_json::to_value(s.probe.as_ref().ok_or_else(|| missing("probe report"))?).map_err(Error::from)?,
        "night" => serde_json::to_value(s.night.as_ref().ok_or_else(|| missing("night solve"))?).map_err(Error::from)?,
        "day" => serde_json::to_value(s.day.as_ref().ok_or_else(|| missing("day solve"))?).map_err(Error::from)?,
        "feedback" => serde_json::to_value(s.feedback(q.stage.unwrap_or(Stage::Night))?).map_err(Error::from)?,
        "final" => {
            let rep = s.final_report()?;
            if q.format.as_deref() == Some("text") {
                return Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], rep.render()).into_response());
            }
            serde_json::to_value(rep).map_err(Error::from)?
        }
        other => return Err(ApiError::not_found("report", other)),
    };
    Ok(Json(body).into_response())
}

async fn export_instance(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<FormatQuery>) -> ApiResult<Response> {
    let e = st.entry(&id)?;
    let s = e.lock().unwrap().session.clone();
    let fmt: ModelFormat = q.format.as_deref().unwrap_or("lp").parse()?;
    let stage = q.stage.unwrap_or(Stage::Night);
    let text = tokio::task::spawn_blocking(move || s.export_instance(stage, fmt))
        .await
        .map_err(|j| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, j.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}
