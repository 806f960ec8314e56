use serde::{Deserialize, Serialize};

use super::{EntityTopicMap, TopicId};
use crate::components::ComponentId;
use crate::dialogue::{Session, TopState};
use crate::entity::{EntityMention, IntentDecision};
use crate::intent::IntentLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransitionConfig {
    /// Consecutive refusals that trigger a topics reminder.
    pub reminder_threshold: u32,
    /// Minimum turns between two appended suggestions.
    pub suggestion_gap: u32,
    /// Maximum length of a composed response, in characters.
    pub response_cap: usize,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            reminder_threshold: 2,
            suggestion_gap: 2,
            response_cap: 800,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuggestionOrigin {
    EntityRelated,
    Random,
    Reminder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub topic: TopicId,
    pub prompt: String,
    pub origin: SuggestionOrigin,
}

impl Suggestion {
    pub fn new(topic: TopicId, origin: SuggestionOrigin) -> Self {
        Self {
            topic,
            prompt: format!(
                "I have something interesting about {}, would you like to hear about it?",
                topic.alias()
            ),
            origin,
        }
    }
}

/// Picks a topic to offer: the entity's mapped topic when it has not been
/// offered yet, otherwise a random unoffered one. The topic is marked offered.
pub fn recommend_topic(
    session: &mut Session,
    last_entity: Option<&EntityMention>,
    map: &EntityTopicMap,
) -> Option<Suggestion> {
    let related = last_entity
        .and_then(|e| map.topic_for(&e.description))
        .filter(|t| !session.offered_topics.contains(t));
    let suggestion = match related {
        Some(topic) => Suggestion::new(topic, SuggestionOrigin::EntityRelated),
        None => {
            let open: Vec<TopicId> = TopicId::ALL
                .into_iter()
                .filter(|t| !session.offered_topics.contains(t))
                .collect();
            if open.is_empty() {
                return None;
            }
            let pick = open[session.draw(open.len())];
            Suggestion::new(pick, SuggestionOrigin::Random)
        }
    };
    session.offered_topics.insert(suggestion.topic);
    Some(suggestion)
}

/// True when enough turns have passed since the last appended suggestion.
pub fn suggestion_due(session: &Session, turn_index: u32, gap: u32) -> bool {
    session
        .last_suggestion_turn
        .is_none_or(|last| turn_index.saturating_sub(last) >= gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefusalOutcome {
    Continue,
    Reminder,
}

pub fn register_refusal(session: &mut Session, threshold: u32) -> RefusalOutcome {
    session.refusal_count += 1;
    if session.refusal_count >= threshold {
        session.refusal_count = 0;
        RefusalOutcome::Reminder
    } else {
        RefusalOutcome::Continue
    }
}

/// Lists the topics not yet discussed and asks the user to pick one.
pub fn build_reminder(session: &Session) -> String {
    let open: Vec<&str> = TopicId::ALL
        .iter()
        .filter(|t| !session.discussed_topics.contains(t))
        .map(|t| t.name())
        .collect();
    match open.as_slice() {
        [] => "We have been through all of my topics. What else is on your mind?".to_string(),
        [only] => format!("I can still talk about {only}. Shall we?"),
        [init @ .., last] => format!(
            "I can talk about {} and {last}. Which one would you like?",
            init.join(", ")
        ),
    }
}

/// What a reply to a pending suggestion means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disposition {
    Accept(TopicId),
    Refuse,
    Redirect(ComponentId),
}

pub fn handle_suggestion_state(session: &Session, decision: &IntentDecision) -> Disposition {
    let pending = session
        .pending_suggestion
        .as_ref()
        .filter(|_| session.state.top == TopState::Suggestion);
    match (pending, decision.final_label) {
        (Some(s), IntentLabel::Positive) => Disposition::Accept(s.topic),
        (Some(_), IntentLabel::Negative) => Disposition::Refuse,
        (_, label) => Disposition::Redirect(ComponentId::for_label(label)),
    }
}

/// Component text followed by the suggestion prompt. Text that would push
/// the result past `cap` characters is cut back to a sentence boundary.
pub fn compose_response(
    component_text: &str,
    suggestion: Option<&Suggestion>,
    cap: usize,
) -> String {
    let prompt_len = suggestion.map_or(0, |s| s.prompt.chars().count() + 1);
    let budget = cap.saturating_sub(prompt_len);
    let body = truncate_at_sentence(component_text.trim(), budget);
    match suggestion {
        Some(s) => format!("{body} {}", s.prompt),
        None => body,
    }
}

fn truncate_at_sentence(text: &str, budget: usize) -> String {
    if text.chars().count() <= budget {
        return text.to_string();
    }
    let byte_budget = text
        .char_indices()
        .nth(budget)
        .map_or(text.len(), |(i, _)| i);
    let head = &text[..byte_budget];
    let sentence_end = head
        .char_indices()
        .filter(|&(i, c)| {
            matches!(c, '.' | '!' | '?')
                && text[i + c.len_utf8()..]
                    .chars()
                    .next()
                    .is_none_or(char::is_whitespace)
        })
        .map(|(i, c)| i + c.len_utf8())
        .next_back();
    match sentence_end {
        Some(end) => head[..end].to_string(),
        None => match head.rfind(char::is_whitespace) {
            Some(end) if end > 0 => head[..end].to_string(),
            _ => head.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::{DialogueStateId, SessionId};
    use crate::entity::KnowledgeSource;
    use crate::intent::Prediction;
    use proptest::prelude::*;
    use std::path::Path;

    fn session() -> Session {
        Session::new(SessionId::random(), 11, 20, 0)
    }

    fn map() -> EntityTopicMap {
        let mut text: String = TopicId::ALL
            .iter()
            .map(|t| format!("{}\t{}\n", t.feed_tag(), t.name()))
            .collect();
        text.push_str("singer\tCelebrity\nplanet\tSpace\n");
        EntityTopicMap::parse(&text, Path::new("m.tsv")).unwrap()
    }

    fn entity(description: &str) -> EntityMention {
        EntityMention {
            surface: "E".into(),
            span: 0..1,
            description: description.into(),
            source: KnowledgeSource::Gazetteer,
        }
    }

    fn decision(label: IntentLabel) -> IntentDecision {
        IntentDecision::from_prediction(&Prediction {
            label,
            score: 1.0,
            scores: vec![(label, 1.0)],
        })
    }

    #[test]
    fn entity_topics_come_first() {
        let mut s = session();
        let m = map();
        let celeb =
            recommend_topic(&mut s, Some(&entity("American singer-songwriter")), &m).unwrap();
        assert_eq!(celeb.topic, TopicId::Celebrity);
        assert_eq!(celeb.origin, SuggestionOrigin::EntityRelated);
        let space = recommend_topic(&mut s, Some(&entity("Planet")), &m).unwrap();
        assert_eq!(
            space.prompt,
            "I have something interesting about Cosmos, would you like to hear about it?"
        );
        let again = recommend_topic(&mut s, Some(&entity("Planet")), &m).unwrap();
        assert_eq!(again.origin, SuggestionOrigin::Random);
        assert_ne!(again.topic, TopicId::Space);
    }

    #[test]
    fn exhausted_topics_yield_none() {
        let mut s = session();
        let m = map();
        let offered: Vec<TopicId> = (0..12)
            .map(|_| recommend_topic(&mut s, None, &m).unwrap().topic)
            .collect();
        let mut unique = offered.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 12);
        assert!(recommend_topic(&mut s, None, &m).is_none());
    }

    #[test]
    fn reminder_after_two_refusals() {
        let mut s = session();
        assert_eq!(register_refusal(&mut s, 2), RefusalOutcome::Continue);
        assert_eq!(s.refusal_count, 1);
        assert_eq!(register_refusal(&mut s, 2), RefusalOutcome::Reminder);
        assert_eq!(s.refusal_count, 0);
    }

    #[test]
    fn reminder_lists_open_topics() {
        let mut s = session();
        let full = build_reminder(&s);
        assert!(TopicId::ALL.iter().all(|t| full.contains(t.name())));
        assert!(full.ends_with('?'));
        s.discussed_topics.insert(TopicId::Space);
        let fewer = build_reminder(&s);
        assert!(!fewer.contains("Space"));
        assert_eq!(
            TopicId::ALL
                .iter()
                .filter(|t| fewer.contains(t.name()))
                .count(),
            11
        );
        s.discussed_topics.extend(TopicId::ALL);
        assert!(build_reminder(&s).ends_with('?'));
    }

    #[test]
    fn dispositions_partition_labels() {
        let mut s = session();
        s.pending_suggestion = Some(Suggestion::new(TopicId::Space, SuggestionOrigin::Random));
        s.enter(DialogueStateId::new(TopState::Suggestion));
        for label in IntentLabel::ALL {
            let d = handle_suggestion_state(&s, &decision(label));
            match label {
                IntentLabel::Positive => assert_eq!(d, Disposition::Accept(TopicId::Space)),
                IntentLabel::Negative => assert_eq!(d, Disposition::Refuse),
                other => assert_eq!(d, Disposition::Redirect(ComponentId::for_label(other))),
            }
        }
        s.pending_suggestion = None;
        assert_eq!(
            handle_suggestion_state(&s, &decision(IntentLabel::Positive)),
            Disposition::Redirect(ComponentId::SmallTalk)
        );
    }

    #[test]
    fn compose_examples() {
        let celeb = Suggestion::new(TopicId::Celebrity, SuggestionOrigin::Random);
        let out = compose_response("Hi, how are you?", Some(&celeb), 800);
        assert_eq!(out, format!("Hi, how are you? {}", celeb.prompt));
        assert_eq!(compose_response("Plain text.", None, 800), "Plain text.");
        let long = "First sentence here. Second one is longer than the budget allows.";
        let out = compose_response(long, Some(&celeb), celeb.prompt.len() + 30);
        assert_eq!(out, format!("First sentence here. {}", celeb.prompt));
    }

    #[test]
    fn suggestion_gap() {
        let mut s = session();
        assert!(suggestion_due(&s, 1, 2));
        s.last_suggestion_turn = Some(1);
        assert!(!suggestion_due(&s, 2, 2));
        assert!(suggestion_due(&s, 3, 2));
    }

    proptest! {
        #[test]
        fn composed_text_keeps_prefix_and_one_question(text in "[A-Za-z ,.!]{1,300}", cap in 100usize..900) {
            prop_assume!(!text.trim().is_empty());
            let s = Suggestion::new(TopicId::Hockey, SuggestionOrigin::Random);
            let out = compose_response(&text, Some(&s), cap);
            prop_assert!(out.ends_with(&s.prompt));
            let body = out[..out.len() - s.prompt.len()].trim_end();
            prop_assert!(text.trim().starts_with(body));
            prop_assert!(out.chars().count() <= cap.max(s.prompt.len() + 1));
            prop_assert_eq!(out.matches('?').count(), 1);
        }
    }
}
