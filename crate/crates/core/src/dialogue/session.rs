use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DialogueStateId, StateStack, TopState};
use crate::components::FollowupOffer;
use crate::entity::EntityMention;
use crate::transition::{Suggestion, TopicId};
use crate::{Error, Result};

/// Opaque, unguessable session identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SessionId(String);

impl SessionId {
    pub fn random() -> Self {
        SessionId(uuid::Uuid::new_v4().simple().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for SessionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let valid = !s.is_empty()
            && s.len() <= 64
            && s.chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if valid {
            Ok(SessionId(s.to_string()))
        } else {
            Err(Error::Input(format!("invalid session id '{s}'")))
        }
    }
}

impl TryFrom<String> for SessionId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SessionId> for String {
    fn from(id: SessionId) -> String {
        id.0
    }
}

/// Per-session seed derived from the master seed and the session id.
pub fn derive_seed(master: u64, id: &SessionId) -> u64 {
    // FNV-1a over the id, then one splitmix64 round
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.as_str().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = master ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Speaker {
    User,
    System,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub speaker: Speaker,
    pub text: String,
}

pub const ENTITY_CACHE_KEY: &str = "entity.last";

/// Everything the agent remembers about one conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: SessionId,
    pub seed: u64,
    draws: u64,
    pub state: DialogueStateId,
    pub stack: StateStack,
    cache: BTreeMap<String, Value>,
    context: Vec<ContextEntry>,
    pub refusal_count: u32,
    pub offered_topics: BTreeSet<TopicId>,
    pub discussed_topics: BTreeSet<TopicId>,
    pub pending_suggestion: Option<Suggestion>,
    pub pending_offer: Option<FollowupOffer>,
    pub last_suggestion_turn: Option<u32>,
    pub turn_count: u32,
    pub rating: Option<u8>,
    pub finalized: bool,
    pub created_ms: i64,
    pub last_active_ms: i64,
}

impl Session {
    pub fn new(id: SessionId, seed: u64, stack_bound: usize, now_ms: i64) -> Self {
        Self {
            id,
            seed,
            draws: 0,
            state: DialogueStateId::new(TopState::NewTopic),
            stack: StateStack::new(stack_bound),
            cache: BTreeMap::new(),
            context: Vec::new(),
            refusal_count: 0,
            offered_topics: BTreeSet::new(),
            discussed_topics: BTreeSet::new(),
            pending_suggestion: None,
            pending_offer: None,
            last_suggestion_turn: None,
            turn_count: 0,
            rating: None,
            finalized: false,
            created_ms: now_ms,
            last_active_ms: now_ms,
        }
    }

    pub fn set_cache(&mut self, key: impl Into<String>, value: Value) {
        self.cache.insert(key.into(), value);
    }

    pub fn remove_cache(&mut self, key: &str) -> Option<Value> {
        self.cache.remove(key)
    }

    pub fn get_cache(&self, key: &str) -> Option<&Value> {
        self.cache.get(key)
    }

    pub fn cache(&self) -> &BTreeMap<String, Value> {
        &self.cache
    }

    pub fn context(&self) -> &[ContextEntry] {
        &self.context
    }

    pub fn push_context(&mut self, speaker: Speaker, text: impl Into<String>) {
        self.context.push(ContextEntry {
            speaker,
            text: text.into(),
        });
    }

    /// Moves to `next`, pushing the current state when the top state changes.
    pub fn enter(&mut self, next: DialogueStateId) {
        if next.top != self.state.top {
            let previous = std::mem::replace(&mut self.state, next);
            self.stack.push(previous);
        } else {
            self.state = next;
        }
    }

    /// Pops the previous state; an empty stack returns to `NewTopic`.
    pub fn backtrack(&mut self) -> DialogueStateId {
        self.state = self
            .stack
            .pop()
            .unwrap_or_else(|| DialogueStateId::new(TopState::NewTopic));
        self.state.clone()
    }

    pub fn remember_entity(&mut self, mention: &EntityMention) {
        self.set_cache(ENTITY_CACHE_KEY, Value::String(mention.surface.clone()));
    }

    pub fn last_entity(&self) -> Option<&str> {
        self.get_cache(ENTITY_CACHE_KEY).and_then(Value::as_str)
    }

    /// Uniform draw from `0..n` on the session's own random stream.
    pub fn draw(&mut self, n: usize) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.draws);
        self.draws += 1;
        rng.gen_range(0..n.max(1))
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// Replaces third-person pronouns with the most recent entity surface.
pub fn resolve_coreference(session: &Session, text: &str) -> String {
    let Some(entity) = session.last_entity() else {
        return text.to_string();
    };
    const PRONOUNS: [&str; 7] = ["he", "she", "him", "her", "it", "they", "them"];
    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if PRONOUNS.contains(&word.to_lowercase().as_str()) {
            out.push_str(entity);
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '\'' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::KnowledgeSource;

    fn session() -> Session {
        Session::new(SessionId::random(), 7, 20, 0)
    }

    fn mention(surface: &str) -> EntityMention {
        EntityMention {
            surface: surface.into(),
            span: 0..1,
            description: "x".into(),
            source: KnowledgeSource::Gazetteer,
        }
    }

    #[test]
    fn new_session_defaults() {
        let s = session();
        assert_eq!(s.state.top, TopState::NewTopic);
        assert!(s.stack.is_empty());
        assert_eq!(s.refusal_count, 0);
        assert!(s.context().is_empty());
        assert_ne!(SessionId::random(), SessionId::random());
    }

    #[test]
    fn coreference_replaces_pronouns() {
        let mut s = session();
        assert_eq!(resolve_coreference(&s, "what is it"), "what is it");
        s.remember_entity(&mention("Bruno Mars"));
        assert_eq!(
            resolve_coreference(&s, "tell me more about him"),
            "tell me more about Bruno Mars"
        );
        s.remember_entity(&mention("Jim Bridenstine"));
        assert_eq!(
            resolve_coreference(&s, "where does he serve?"),
            "where does Jim Bridenstine serve?"
        );
        assert_eq!(resolve_coreference(&s, "it's the hero"), "it's the hero");
    }

    #[test]
    fn backtrack_is_lifo() {
        let mut s = session();
        s.enter(DialogueStateId::new(TopState::Movies));
        s.enter(DialogueStateId::new(TopState::Music));
        assert_eq!(s.backtrack().top, TopState::Movies);
        assert_eq!(s.backtrack().top, TopState::NewTopic);
        assert_eq!(s.backtrack().top, TopState::NewTopic);
        assert_eq!(s.state.top, TopState::NewTopic);
    }

    #[test]
    fn cache_last_write_wins() {
        let mut s = session();
        let fields = serde_json::json!(["plot", "star", "producer", "director", "genre"]);
        s.set_cache("movie.remaining_fields", fields.clone());
        assert_eq!(s.get_cache("movie.remaining_fields"), Some(&fields));
        assert_eq!(s.get_cache("absent"), None);
        s.set_cache("movie.remaining_fields", serde_json::json!([]));
        assert_eq!(
            s.get_cache("movie.remaining_fields"),
            Some(&serde_json::json!([]))
        );
    }

    #[test]
    fn draws_are_reproducible() {
        let mut a = session();
        let mut b = a.clone();
        let xs: Vec<usize> = (0..10).map(|_| a.draw(100)).collect();
        let ys: Vec<usize> = (0..10).map(|_| b.draw(100)).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.draws(), 10);
    }

    #[test]
    fn session_ids_validate_and_seeds_differ() {
        assert!("abc-123".parse::<SessionId>().is_ok());
        assert!("../etc".parse::<SessionId>().is_err());
        let a: SessionId = "a".parse().unwrap();
        let b: SessionId = "b".parse().unwrap();
        assert_ne!(derive_seed(1, &a), derive_seed(1, &b));
        assert_eq!(derive_seed(1, &a), derive_seed(1, &a));
    }
}
