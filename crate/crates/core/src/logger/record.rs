use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::components::ComponentId;
use crate::dialogue::{DialogueStateId, RouteReason, SessionId};
use crate::entity::IntentDecision;
use crate::intent::IntentLabel;
use crate::transition::TopicId;

/// Version stamped on every log line.
pub const LOG_SCHEMA_VERSION: u32 = 1;

fn schema() -> u32 {
    LOG_SCHEMA_VERSION
}

/// Classification outcome kept in the log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSummary {
    pub general_label: IntentLabel,
    pub general_score: f64,
    pub final_label: IntentLabel,
    pub overridden: bool,
    pub entity: Option<String>,
    pub entity_class: Option<String>,
}

impl From<&IntentDecision> for DecisionSummary {
    fn from(d: &IntentDecision) -> Self {
        Self {
            general_label: d.general_label,
            general_score: d.general_score,
            final_label: d.final_label,
            overridden: d.overridden,
            entity: d.entity.as_ref().map(|e| e.surface.clone()),
            entity_class: d.entity_match.as_ref().map(|m| m.class.to_string()),
        }
    }
}

/// One user utterance and the system's answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    #[serde(default = "schema")]
    pub schema: u32,
    pub session_id: SessionId,
    /// 1-based and contiguous within a session.
    pub turn_index: u32,
    pub timestamp_ms: i64,
    pub user_text: String,
    pub resolved_text: String,
    pub decision: DecisionSummary,
    pub state_before: DialogueStateId,
    pub state_after: DialogueStateId,
    pub component: ComponentId,
    pub route_reason: RouteReason,
    pub response_text: String,
    pub suggestion: Option<TopicId>,
    pub latency_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionStart {
    #[serde(default = "schema")]
    pub schema: u32,
    pub session_id: SessionId,
    /// Seed of the session's random stream, for replay.
    pub seed: u64,
    pub started_ms: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSummary {
    #[serde(default = "schema")]
    pub schema: u32,
    pub session_id: SessionId,
    pub turn_count: u32,
    pub rating: Option<u8>,
    pub feedback: Option<String>,
    pub component_turns: BTreeMap<ComponentId, u32>,
    pub started_ms: i64,
    pub ended_ms: i64,
}

/// A line of the session index file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexRecord {
    Start(SessionStart),
    Summary(SessionSummary),
}
