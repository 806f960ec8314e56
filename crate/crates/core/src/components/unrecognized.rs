use serde_json::{json, Value};

use super::{Component, ComponentId, ComponentRequest, ComponentResponse};

const COUNT_KEY: &str = "unrecognized.count";

const PHRASINGS: [&str; 3] = [
    "Sorry, I didn't quite get that. Could you say it another way?",
    "I'm not sure I follow. What would you like to talk about?",
    "Hmm, that one's beyond me. Could you ask me something else?",
];

/// Asks the user to rephrase, rotating through a few wordings.
pub struct UnrecognizedComponent;

impl Component for UnrecognizedComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Unrecognized
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let n = request
            .cache(COUNT_KEY)
            .and_then(Value::as_u64)
            .unwrap_or(0) as usize;
        ComponentResponse::say(PHRASINGS[n % PHRASINGS.len()]).with_cache(COUNT_KEY, json!(n + 1))
    }
}
