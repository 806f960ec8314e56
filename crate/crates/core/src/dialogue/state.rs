use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::components::ComponentId;

/// Top-level dialogue states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopState {
    NewTopic,
    Greetings,
    InfoRequest,
    Movies,
    Music,
    News,
    Wiki,
    Weather,
    Joke,
    LiveQa,
    Opinion,
    Food,
    SmallTalk,
    Suggestion,
}

impl TopState {
    pub const ALL: [TopState; 14] = [
        TopState::NewTopic,
        TopState::Greetings,
        TopState::InfoRequest,
        TopState::Movies,
        TopState::Music,
        TopState::News,
        TopState::Wiki,
        TopState::Weather,
        TopState::Joke,
        TopState::LiveQa,
        TopState::Opinion,
        TopState::Food,
        TopState::SmallTalk,
        TopState::Suggestion,
    ];

    /// State entered when `component` answers. Small talk that opens with a
    /// greeting lands in `Greetings`.
    pub fn for_component(component: ComponentId, greeting: bool) -> TopState {
        match component {
            ComponentId::SmallTalk if greeting => TopState::Greetings,
            ComponentId::SmallTalk => TopState::SmallTalk,
            ComponentId::News => TopState::News,
            ComponentId::Wiki => TopState::Wiki,
            ComponentId::Weather => TopState::Weather,
            ComponentId::Joke => TopState::Joke,
            ComponentId::LiveQa => TopState::LiveQa,
            ComponentId::Movies => TopState::Movies,
            ComponentId::Music => TopState::Music,
            ComponentId::Opinion => TopState::Opinion,
            ComponentId::Food => TopState::Food,
            ComponentId::Transition => TopState::NewTopic,
            ComponentId::Unrecognized => TopState::InfoRequest,
        }
    }

    /// Component owning this state, if any.
    pub fn component(self) -> Option<ComponentId> {
        match self {
            TopState::NewTopic | TopState::Suggestion => None,
            TopState::Greetings | TopState::SmallTalk => Some(ComponentId::SmallTalk),
            TopState::InfoRequest => Some(ComponentId::Unrecognized),
            TopState::Movies => Some(ComponentId::Movies),
            TopState::Music => Some(ComponentId::Music),
            TopState::News => Some(ComponentId::News),
            TopState::Wiki => Some(ComponentId::Wiki),
            TopState::Weather => Some(ComponentId::Weather),
            TopState::Joke => Some(ComponentId::Joke),
            TopState::LiveQa => Some(ComponentId::LiveQa),
            TopState::Opinion => Some(ComponentId::Opinion),
            TopState::Food => Some(ComponentId::Food),
        }
    }
}

/// Top-level state plus an optional component-defined sub-state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DialogueStateId {
    pub top: TopState,
    pub sub: Option<String>,
}

impl DialogueStateId {
    pub fn new(top: TopState) -> Self {
        Self { top, sub: None }
    }

    pub fn with_sub(top: TopState, sub: impl Into<String>) -> Self {
        Self {
            top,
            sub: Some(sub.into()),
        }
    }
}

impl fmt::Display for DialogueStateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sub {
            Some(sub) => write!(f, "{:?}/{sub}", self.top),
            None => write!(f, "{:?}", self.top),
        }
    }
}

pub const DEFAULT_STACK_BOUND: usize = 20;

/// Recent states, newest last. Pushing past the bound drops the oldest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateStack {
    bound: usize,
    items: VecDeque<DialogueStateId>,
}

impl Default for StateStack {
    fn default() -> Self {
        Self::new(DEFAULT_STACK_BOUND)
    }
}

impl StateStack {
    pub fn new(bound: usize) -> Self {
        Self {
            bound: bound.max(1),
            items: VecDeque::new(),
        }
    }

    pub fn push(&mut self, state: DialogueStateId) {
        if self.items.len() == self.bound {
            self.items.pop_front();
        }
        self.items.push_back(state);
    }

    pub fn pop(&mut self) -> Option<DialogueStateId> {
        self.items.pop_back()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &DialogueStateId> {
        self.items.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_states_and_component_round_trip() {
        assert_eq!(TopState::ALL.len(), 14);
        for c in ComponentId::ALL {
            let top = TopState::for_component(c, false);
            if c != ComponentId::Transition {
                assert_eq!(top.component(), Some(c));
            }
        }
    }

    #[test]
    fn overflow_drops_oldest() {
        let mut s = StateStack::new(DEFAULT_STACK_BOUND);
        for i in 0..DEFAULT_STACK_BOUND + 5 {
            s.push(DialogueStateId::with_sub(TopState::Movies, i.to_string()));
        }
        assert_eq!(s.len(), DEFAULT_STACK_BOUND);
        assert_eq!(s.iter().next().unwrap().sub.as_deref(), Some("5"));
        assert_eq!(s.pop().unwrap().sub.as_deref(), Some("24"));
    }

    #[test]
    fn display_includes_sub_state() {
        assert_eq!(
            DialogueStateId::with_sub(TopState::Movies, "awaiting_field_choice").to_string(),
            "Movies/awaiting_field_choice"
        );
        assert_eq!(
            DialogueStateId::new(TopState::NewTopic).to_string(),
            "NewTopic"
        );
    }
}
