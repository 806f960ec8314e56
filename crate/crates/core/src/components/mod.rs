//! The twelve response components behind one interface, with offline
//! fixture stores and pluggable clients for real-time sources.

mod food;
mod id;
mod joke;
mod liveqa;
mod movies;
mod music;
mod news;
mod opinion;
mod registry;
mod smalltalk;
mod transition;
mod unrecognized;
mod weather;
mod wiki;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dialogue::{RoutingResult, Session};
use crate::entity::IntentDecision;
use crate::intent::IntentLabel;
use crate::transition::TopicId;

pub use food::{FoodComponent, Recipe, RecipeBook};
pub use id::ComponentId;
pub use joke::JokeComponent;
pub use liveqa::{LiveQaComponent, QaPair};
pub use movies::{MovieDb, MovieField, MovieRecord, MoviesComponent, Recency};
pub use music::{ChartEntry, MusicCharts, MusicComponent};
pub use news::{ingest_feed, FeedStore, NewsComponent, NewsItem};
pub use opinion::OpinionComponent;
pub use registry::{ClientSettings, Components};
pub use smalltalk::{SmallTalkComponent, Template, TemplateSet};
pub use transition::TransitionComponent;
pub use unrecognized::UnrecognizedComponent;
pub use weather::{
    extract_city, FixtureWeather, RemoteWeather, WeatherClient, WeatherComponent, WeatherReading,
};
pub use wiki::{FixtureWiki, RemoteWiki, WikiClient, WikiComponent};

/// An offer the next user turn may accept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FollowupOffer {
    pub prompt: String,
    /// Component that serves a "yes".
    pub accept_route: ComponentId,
}

impl FollowupOffer {
    pub fn new(prompt: impl Into<String>, accept_route: ComponentId) -> Self {
        Self {
            prompt: prompt.into(),
            accept_route,
        }
    }
}

/// Read-only view a component answers from.
#[derive(Debug, Clone, Copy)]
pub struct ComponentRequest<'a> {
    pub resolved_text: &'a str,
    pub tokens: &'a [String],
    pub session: &'a Session,
    pub decision: &'a IntentDecision,
    pub route: &'a RoutingResult,
}

impl ComponentRequest<'_> {
    pub fn cache(&self, key: &str) -> Option<&Value> {
        self.session.get_cache(key)
    }

    pub fn sub_state(&self) -> Option<&str> {
        self.session.state.sub.as_deref()
    }

    pub fn label(&self) -> IntentLabel {
        self.decision.final_label
    }

    pub fn is_positive(&self) -> bool {
        self.label() == IntentLabel::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.label() == IntentLabel::Negative
    }

    pub fn has_token(&self, word: &str) -> bool {
        self.tokens.iter().any(|t| t == word)
    }

    /// Entity surface found by the linker this turn.
    pub fn entity(&self) -> Option<&str> {
        self.decision.entity.as_ref().map(|e| e.surface.as_str())
    }
}

/// What a component says and which session changes it asks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentResponse {
    pub text: String,
    pub followup_offer: Option<FollowupOffer>,
    pub cache_updates: BTreeMap<String, Value>,
    pub sub_state: Option<String>,
    pub served_topic: Option<TopicId>,
    /// Set when a backing client failed and fallback text was used.
    pub error: Option<String>,
}

impl ComponentResponse {
    pub fn say(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            followup_offer: None,
            cache_updates: BTreeMap::new(),
            sub_state: None,
            served_topic: None,
            error: None,
        }
    }

    /// `body` followed by a question the next turn may answer.
    pub fn offer(body: &str, prompt: &str, accept_route: ComponentId, sub_state: &str) -> Self {
        let text = if body.is_empty() {
            prompt.to_string()
        } else {
            format!("{body} {prompt}")
        };
        Self {
            followup_offer: Some(FollowupOffer::new(prompt, accept_route)),
            sub_state: Some(sub_state.to_string()),
            ..Self::say(text)
        }
    }

    pub fn with_cache(mut self, key: &str, value: Value) -> Self {
        self.cache_updates.insert(key.to_string(), value);
        self
    }

    pub fn with_topic(mut self, topic: Option<TopicId>) -> Self {
        self.served_topic = topic;
        self
    }

    pub fn with_error(mut self, error: impl Into<String>) -> Self {
        self.error = Some(error.into());
        self
    }
}

pub trait Component: Send + Sync {
    fn id(&self) -> ComponentId;
    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse;
}

/// "a", "a and b", "a, b and c".
pub(crate) fn join_list<S: AsRef<str>>(items: &[S]) -> String {
    join_with(items, "and")
}

pub(crate) fn join_with<S: AsRef<str>>(items: &[S], conjunction: &str) -> String {
    match items {
        [] => String::new(),
        [one] => one.as_ref().to_string(),
        [init @ .., last] => format!(
            "{} {conjunction} {}",
            init.iter()
                .map(AsRef::as_ref)
                .collect::<Vec<_>>()
                .join(", "),
            last.as_ref()
        ),
    }
}

/// Appends a full stop unless the text already ends a sentence.
pub(crate) fn sentence(text: &str) -> String {
    let t = text.trim();
    if t.ends_with(['.', '!', '?']) {
        t.to_string()
    } else {
        format!("{t}.")
    }
}

/// Offer of the topics list, used as the fallback by several components.
pub(crate) const TOPIC_OFFER: &str = "Would you like to hear which topics I know about?";

pub(crate) fn string_list(value: Option<&Value>) -> Vec<String> {
    value
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::dialogue::{RouteReason, SessionId};
    use crate::intent::Prediction;
    use crate::text::tokenize;

    pub fn decision(label: IntentLabel) -> IntentDecision {
        IntentDecision::from_prediction(&Prediction {
            label,
            score: 0.9,
            scores: vec![(label, 0.9)],
        })
    }

    pub fn route(component: ComponentId, text: &str) -> RoutingResult {
        RoutingResult {
            component,
            resolved_text: text.to_string(),
            reason: RouteReason::Classifier,
            topic: None,
            disposition: None,
            refusal: None,
        }
    }

    pub fn session() -> Session {
        Session::new(SessionId::random(), 5, 20, 0)
    }

    /// Applies a response the way the agent does, for multi-turn tests.
    pub fn apply(session: &mut Session, response: &ComponentResponse) {
        for (k, v) in &response.cache_updates {
            session.set_cache(k.clone(), v.clone());
        }
        session.state.sub = response.sub_state.clone();
        session.pending_offer = response.followup_offer.clone();
    }

    /// Runs one turn against `component` with the given label.
    pub fn turn(
        component: &dyn Component,
        session: &mut Session,
        label: IntentLabel,
        text: &str,
    ) -> ComponentResponse {
        let tokens = tokenize(text);
        let d = decision(label);
        let r = route(component.id(), text);
        let response = component.respond(&ComponentRequest {
            resolved_text: text,
            tokens: &tokens,
            session,
            decision: &d,
            route: &r,
        });
        apply(session, &response);
        response
    }
}
