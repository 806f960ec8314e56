use serde::{Deserialize, Serialize};

use super::{DialogueStateId, Session, TopState};
use crate::components::ComponentId;
use crate::entity::IntentDecision;
use crate::intent::IntentLabel;
use crate::text::tokenize;
use crate::transition::{
    handle_suggestion_state, register_refusal, Disposition, RefusalOutcome, TopicId,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RouterConfig {
    /// General score needed to leave an active component sub-state.
    pub switch_confidence: f64,
    /// Follows the transition settings when built by the agent.
    #[serde(skip)]
    pub reminder_threshold: u32,
}

impl Default for RouterConfig {
    fn default() -> Self {
        Self {
            switch_confidence: 0.6,
            reminder_threshold: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteReason {
    Classifier,
    PredefinedState,
    SuggestionRedirect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingResult {
    pub component: ComponentId,
    pub resolved_text: String,
    pub reason: RouteReason,
    /// Topic the user accepted or named; served by the news component.
    pub topic: Option<TopicId>,
    pub disposition: Option<Disposition>,
    pub refusal: Option<RefusalOutcome>,
}

const GREETINGS: [&str; 6] = ["hello", "hi", "hey", "greetings", "howdy", "morning"];

fn is_greeting(tokens: &[String]) -> bool {
    match tokens {
        [first, ..] if GREETINGS.contains(&first.as_str()) => true,
        [good, time, ..] => {
            good == "good" && matches!(time.as_str(), "morning" | "afternoon" | "evening")
        }
        _ => false,
    }
}

/// Chooses the component for this turn and moves the session to its state.
pub fn update_and_route(
    session: &mut Session,
    decision: &IntentDecision,
    resolved_text: &str,
    config: &RouterConfig,
) -> RoutingResult {
    let tokens = tokenize(resolved_text);
    let mut result = RoutingResult {
        component: ComponentId::Unrecognized,
        resolved_text: resolved_text.to_string(),
        reason: RouteReason::Classifier,
        topic: None,
        disposition: None,
        refusal: None,
    };
    let by_label = |label: IntentLabel| -> (ComponentId, Option<TopicId>) {
        let component = ComponentId::for_label(label);
        match (component, TopicId::mentioned_in(&tokens)) {
            (ComponentId::Transition, Some(topic)) => (ComponentId::News, Some(topic)),
            (component, _) => (component, None),
        }
    };

    if session.state.top == TopState::Suggestion && session.pending_suggestion.is_some() {
        let disposition = handle_suggestion_state(session, decision);
        session.pending_suggestion = None;
        result.disposition = Some(disposition);
        match disposition {
            Disposition::Accept(topic) => {
                result.component = ComponentId::News;
                result.topic = Some(topic);
                result.reason = RouteReason::PredefinedState;
                session.discussed_topics.insert(topic);
            }
            Disposition::Refuse => {
                result.component = ComponentId::Transition;
                result.reason = RouteReason::PredefinedState;
                result.refusal = Some(register_refusal(session, config.reminder_threshold));
            }
            Disposition::Redirect(_) => {
                (result.component, result.topic) = by_label(decision.final_label);
                result.reason = RouteReason::SuggestionRedirect;
            }
        }
    } else {
        let owner = session
            .state
            .sub
            .as_ref()
            .and(session.state.top.component());
        let sentiment = matches!(
            decision.final_label,
            IntentLabel::Positive | IntentLabel::Negative
        );
        let (target, topic) = by_label(decision.final_label);
        match owner {
            Some(owner)
                if sentiment
                    || target == owner
                    || !(decision.overridden
                        || decision.general_score >= config.switch_confidence) =>
            {
                result.reason = RouteReason::PredefinedState;
                result.component = match (&session.pending_offer, decision.final_label) {
                    (Some(offer), IntentLabel::Positive) => offer.accept_route,
                    (Some(offer), IntentLabel::Negative) if offer.accept_route != owner => {
                        ComponentId::Transition
                    }
                    _ => owner,
                };
            }
            _ => {
                result.component = target;
                result.topic = topic;
            }
        }
    }

    if result.refusal.is_none() {
        session.refusal_count = 0;
    }
    let top = TopState::for_component(result.component, is_greeting(&tokens));
    if top == session.state.top {
        if session.state.top.component() != Some(result.component) {
            session.state.sub = None;
        }
    } else {
        session.enter(DialogueStateId::new(top));
    }
    result
}
