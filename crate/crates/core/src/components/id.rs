use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::intent::IntentLabel;
use crate::{Error, Result};

/// The twelve response components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentId {
    SmallTalk,
    News,
    Wiki,
    Weather,
    Joke,
    LiveQa,
    Movies,
    Music,
    Opinion,
    Food,
    Transition,
    Unrecognized,
}

impl ComponentId {
    pub const ALL: [ComponentId; 12] = [
        ComponentId::SmallTalk,
        ComponentId::News,
        ComponentId::Wiki,
        ComponentId::Weather,
        ComponentId::Joke,
        ComponentId::LiveQa,
        ComponentId::Movies,
        ComponentId::Music,
        ComponentId::Opinion,
        ComponentId::Food,
        ComponentId::Transition,
        ComponentId::Unrecognized,
    ];

    /// Component serving an intent label. Sentiment labels have no component
    /// of their own and fall to small talk outside a component loop.
    pub fn for_label(label: IntentLabel) -> ComponentId {
        match label {
            IntentLabel::Positive | IntentLabel::Negative | IntentLabel::SmallTalk => {
                ComponentId::SmallTalk
            }
            IntentLabel::News => ComponentId::News,
            IntentLabel::Wiki => ComponentId::Wiki,
            IntentLabel::Weather => ComponentId::Weather,
            IntentLabel::Joke => ComponentId::Joke,
            IntentLabel::LiveQa => ComponentId::LiveQa,
            IntentLabel::Movies => ComponentId::Movies,
            IntentLabel::Music => ComponentId::Music,
            IntentLabel::Opinion => ComponentId::Opinion,
            IntentLabel::Food => ComponentId::Food,
            IntentLabel::Transition => ComponentId::Transition,
            IntentLabel::Unrecognized => ComponentId::Unrecognized,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentId::SmallTalk => "SmallTalk",
            ComponentId::News => "News",
            ComponentId::Wiki => "Wiki",
            ComponentId::Weather => "Weather",
            ComponentId::Joke => "Joke",
            ComponentId::LiveQa => "LiveQA",
            ComponentId::Movies => "Movies",
            ComponentId::Music => "Music",
            ComponentId::Opinion => "Opinion",
            ComponentId::Food => "Food",
            ComponentId::Transition => "Transition",
            ComponentId::Unrecognized => "Unrecognized",
        }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComponentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComponentId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Input(format!("unknown component '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_label_has_a_component() {
        for label in IntentLabel::ALL {
            let c = ComponentId::for_label(label);
            assert!(ComponentId::ALL.contains(&c));
            assert_eq!(c.name().parse::<ComponentId>().unwrap(), c);
        }
        assert_eq!(
            ComponentId::for_label(IntentLabel::Positive),
            ComponentId::SmallTalk
        );
    }
}
