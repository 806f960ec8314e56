use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::record::*;
use crate::components::ComponentId;
use crate::dialogue::SessionId;
use crate::{Error, Result};

pub const SESSION_INDEX_FILE: &str = "sessions.jsonl";

/// Name of the turn file for the UTC day of `timestamp_ms`.
pub fn turn_file_name(timestamp_ms: i64) -> String {
    let day = DateTime::<Utc>::from_timestamp_millis(timestamp_ms)
        .unwrap_or_default()
        .format("%Y-%m-%d");
    format!("turns-{day}.jsonl")
}

#[derive(Debug, Clone)]
struct Tracked {
    start: SessionStart,
    last_turn: u32,
    last_ms: i64,
    component_turns: BTreeMap<ComponentId, u32>,
    summary: Option<SessionSummary>,
}

impl Tracked {
    fn new(start: SessionStart) -> Self {
        Self {
            last_ms: start.started_ms,
            start,
            last_turn: 0,
            component_turns: BTreeMap::new(),
            summary: None,
        }
    }

    fn record(&mut self, turn: &TurnRecord) {
        self.last_turn = turn.turn_index;
        self.last_ms = self.last_ms.max(turn.timestamp_ms);
        *self.component_turns.entry(turn.component).or_default() += 1;
    }

    fn summarize(
        &self,
        rating: Option<u8>,
        feedback: Option<String>,
        ended_ms: i64,
    ) -> SessionSummary {
        SessionSummary {
            schema: LOG_SCHEMA_VERSION,
            session_id: self.start.session_id.clone(),
            turn_count: self.last_turn,
            rating,
            feedback,
            component_turns: self.component_turns.clone(),
            started_ms: self.start.started_ms,
            ended_ms,
        }
    }
}

/// Append-only dialogue log in a directory: one turn file per UTC day plus
/// a session index.
#[derive(Debug)]
pub struct DialogueLog {
    dir: PathBuf,
    sessions: Mutex<HashMap<SessionId, Tracked>>,
}

fn append_line<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut line = serde_json::to_vec(value)?;
    line.push(b'\n');
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    file.write_all(&line).map_err(|e| Error::io(path, e))
}

impl DialogueLog {
    /// Opens (creating if needed) the log in `dir` and picks up any sessions
    /// already recorded there.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let loaded = load_sessions(&dir, None)?;
        let mut sessions = HashMap::new();
        for log in loaded.sessions {
            let Some(start) = log.start else { continue };
            let mut tracked = Tracked::new(start);
            for turn in &log.turns {
                tracked.record(turn);
            }
            tracked.summary = log.finalized.then_some(log.summary);
            sessions.insert(tracked.start.session_id.clone(), tracked);
        }
        Ok(Self {
            dir,
            sessions: Mutex::new(sessions),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<SessionId, Tracked>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn start_session(&self, start: SessionStart) -> Result<()> {
        let mut sessions = self.lock();
        if sessions.contains_key(&start.session_id) {
            return Err(Error::Conflict(format!(
                "session {} already exists",
                start.session_id
            )));
        }
        append_line(
            &self.dir.join(SESSION_INDEX_FILE),
            &IndexRecord::Start(start.clone()),
        )?;
        sessions.insert(start.session_id.clone(), Tracked::new(start));
        Ok(())
    }

    /// Appends one turn; its index must follow the session's last one.
    pub fn append_turn(&self, record: &TurnRecord) -> Result<()> {
        let mut sessions = self.lock();
        let tracked = sessions
            .get_mut(&record.session_id)
            .ok_or_else(|| Error::NotFound(format!("session {}", record.session_id)))?;
        if tracked.summary.is_some() {
            return Err(Error::Conflict(format!(
                "session {} is finalized",
                record.session_id
            )));
        }
        let expected = tracked.last_turn + 1;
        if record.turn_index != expected {
            return Err(Error::Sequencing {
                session: record.session_id.to_string(),
                expected,
                found: record.turn_index,
            });
        }
        append_line(&self.dir.join(turn_file_name(record.timestamp_ms)), record)?;
        tracked.record(record);
        Ok(())
    }

    /// Closes a session with an optional 1-5 rating. Repeating the call with
    /// the same arguments returns the same summary.
    pub fn finalize_session(
        &self,
        id: &SessionId,
        rating: Option<u8>,
        feedback: Option<String>,
        now_ms: i64,
    ) -> Result<SessionSummary> {
        if let Some(r) = rating.filter(|r| !(1..=5).contains(r)) {
            return Err(Error::Input(format!(
                "rating must be between 1 and 5, got {r}"
            )));
        }
        let mut sessions = self.lock();
        let tracked = sessions
            .get_mut(id)
            .ok_or_else(|| Error::NotFound(format!("session {id}")))?;
        if let Some(existing) = &tracked.summary {
            return if existing.rating == rating && existing.feedback == feedback {
                Ok(existing.clone())
            } else {
                Err(Error::Conflict(format!(
                    "session {id} was already finalized"
                )))
            };
        }
        let summary = tracked.summarize(rating, feedback, now_ms.max(tracked.last_ms));
        append_line(
            &self.dir.join(SESSION_INDEX_FILE),
            &IndexRecord::Summary(summary.clone()),
        )?;
        tracked.summary = Some(summary.clone());
        Ok(summary)
    }

    pub fn is_finalized(&self, id: &SessionId) -> Option<bool> {
        self.lock().get(id).map(|t| t.summary.is_some())
    }

    pub fn last_turn(&self, id: &SessionId) -> Option<u32> {
        self.lock().get(id).map(|t| t.last_turn)
    }

    /// Summary so far, or the final one once the session is closed.
    pub fn summary(&self, id: &SessionId) -> Option<SessionSummary> {
        self.lock().get(id).map(|t| {
            t.summary
                .clone()
                .unwrap_or_else(|| t.summarize(None, None, t.last_ms))
        })
    }

    /// All recorded turns of one session in order.
    pub fn session_turns(&self, id: &SessionId) -> Result<Vec<TurnRecord>> {
        if !self.lock().contains_key(id) {
            return Err(Error::NotFound(format!("session {id}")));
        }
        let mut turns = Vec::new();
        scan_turns(&self.dir, |t| {
            if &t.session_id == id {
                turns.push(t);
            }
        })?;
        turns.sort_by_key(|t| t.turn_index);
        Ok(turns)
    }
}

/// Counts from a tolerant scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub records: usize,
    /// Complete lines that failed to parse.
    pub warnings: usize,
}

/// Reads complete lines of a JSONL file. A trailing line without a newline
/// is still being written and is ignored.
fn scan_file<T: DeserializeOwned>(
    path: &Path,
    stats: &mut ScanStats,
    mut f: impl FnMut(T),
) -> Result<()> {
    let file = match File::open(path) {
        Ok(file) => file,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        let n = reader
            .read_line(&mut line)
            .map_err(|e| Error::io(path, e))?;
        if n == 0 || !line.ends_with('\n') {
            break;
        }
        number += 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(&line) {
            Ok(value) => {
                stats.records += 1;
                f(value);
            }
            Err(e) => {
                stats.warnings += 1;
                tracing::warn!("{}:{number}: skipping corrupt record: {e}", path.display());
            }
        }
    }
    Ok(())
}

fn turn_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("turns-") && n.ends_with(".jsonl"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Streams every turn record in `dir`, day files in date order.
pub fn scan_turns(dir: &Path, mut f: impl FnMut(TurnRecord)) -> Result<ScanStats> {
    let mut stats = ScanStats::default();
    for path in turn_files(dir)? {
        scan_file(&path, &mut stats, &mut f)?;
    }
    Ok(stats)
}

/// One session as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub id: SessionId,
    /// Missing when the index line was lost.
    pub start: Option<SessionStart>,
    /// The stored summary when finalized, otherwise computed from the turns.
    pub summary: SessionSummary,
    pub finalized: bool,
    pub turns: Vec<TurnRecord>,
}

impl SessionLog {
    pub fn components(&self) -> Vec<ComponentId> {
        self.turns.iter().map(|t| t.component).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadedLogs {
    pub sessions: Vec<SessionLog>,
    pub warnings: usize,
}

/// Half-open range of session start times in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRange {
    pub from_ms: i64,
    pub to_ms: i64,
}

impl TimeRange {
    pub fn contains(&self, ms: i64) -> bool {
        (self.from_ms..self.to_ms).contains(&ms)
    }
}

/// Loads every session whose start lies in `range`, ordered by start time.
pub fn load_sessions(dir: &Path, range: Option<TimeRange>) -> Result<LoadedLogs> {
    let mut stats = ScanStats::default();
    let mut starts: HashMap<SessionId, SessionStart> = HashMap::new();
    let mut summaries: HashMap<SessionId, SessionSummary> = HashMap::new();
    scan_file(
        &dir.join(SESSION_INDEX_FILE),
        &mut stats,
        |r: IndexRecord| match r {
            IndexRecord::Start(s) => {
                starts.insert(s.session_id.clone(), s);
            }
            IndexRecord::Summary(s) => {
                summaries.insert(s.session_id.clone(), s);
            }
        },
    )?;
    let mut turns: HashMap<SessionId, Vec<TurnRecord>> = HashMap::new();
    let turn_stats = scan_turns(dir, |t| {
        turns.entry(t.session_id.clone()).or_default().push(t)
    })?;

    let mut ids: Vec<SessionId> = starts.keys().chain(turns.keys()).cloned().collect();
    ids.sort();
    ids.dedup();
    let mut sessions: Vec<SessionLog> = ids
        .into_iter()
        .map(|id| {
            let start = starts.remove(&id);
            let mut session_turns = turns.remove(&id).unwrap_or_default();
            session_turns.sort_by_key(|t| t.turn_index);
            let (summary, finalized) = match summaries.remove(&id) {
                Some(s) => (s, true),
                None => {
                    let started_ms = start
                        .as_ref()
                        .map(|s| s.started_ms)
                        .or_else(|| session_turns.first().map(|t| t.timestamp_ms))
                        .unwrap_or_default();
                    let mut component_turns = BTreeMap::new();
                    for t in &session_turns {
                        *component_turns.entry(t.component).or_default() += 1;
                    }
                    let summary = SessionSummary {
                        schema: LOG_SCHEMA_VERSION,
                        session_id: id.clone(),
                        turn_count: session_turns.len() as u32,
                        rating: None,
                        feedback: None,
                        component_turns,
                        started_ms,
                        ended_ms: session_turns.last().map_or(started_ms, |t| t.timestamp_ms),
                    };
                    (summary, false)
                }
            };
            SessionLog {
                id,
                start,
                summary,
                finalized,
                turns: session_turns,
            }
        })
        .filter(|s| range.is_none_or(|r| r.contains(s.summary.started_ms)))
        .collect();
    sessions.sort_by(|a, b| {
        a.summary
            .started_ms
            .cmp(&b.summary.started_ms)
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(LoadedLogs {
        sessions,
        warnings: stats.warnings + turn_stats.warnings,
    })
}
