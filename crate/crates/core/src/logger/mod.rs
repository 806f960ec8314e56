//! Append-only JSON-lines log of turns and sessions.

mod record;
mod store;

pub use record::{
    DecisionSummary, IndexRecord, SessionStart, SessionSummary, TurnRecord, LOG_SCHEMA_VERSION,
};
pub use store::{
    load_sessions, scan_turns, turn_file_name, DialogueLog, LoadedLogs, ScanStats, SessionLog,
    TimeRange, SESSION_INDEX_FILE,
};

#[cfg(test)]
mod tests;
