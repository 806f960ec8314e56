//! Proactive topic transitions: recommendations, reminders, the suggestion
//! state and final response composition.

mod engine;
mod topic;

pub use engine::{
    build_reminder, compose_response, handle_suggestion_state, recommend_topic, register_refusal,
    suggestion_due, Disposition, RefusalOutcome, Suggestion, SuggestionOrigin, TransitionConfig,
};
pub use topic::{EntityTopicMap, TopicId};
