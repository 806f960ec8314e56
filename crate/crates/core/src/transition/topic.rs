use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{data_lines, read_to_string};
use crate::text::tokenize;
use crate::{Error, Result};

/// Recommendation topics the agent can steer a conversation towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TopicId {
    Basketball,
    Hockey,
    Soccer,
    Animal,
    Football,
    Science,
    Baseball,
    Space,
    Health,
    Technology,
    Celebrity,
    Travel,
}

impl TopicId {
    pub const ALL: [TopicId; 12] = [
        TopicId::Basketball,
        TopicId::Hockey,
        TopicId::Soccer,
        TopicId::Animal,
        TopicId::Football,
        TopicId::Science,
        TopicId::Baseball,
        TopicId::Space,
        TopicId::Health,
        TopicId::Technology,
        TopicId::Celebrity,
        TopicId::Travel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopicId::Basketball => "Basketball",
            TopicId::Hockey => "Hockey",
            TopicId::Soccer => "Soccer",
            TopicId::Animal => "Animal",
            TopicId::Football => "Football",
            TopicId::Science => "Science",
            TopicId::Baseball => "Baseball",
            TopicId::Space => "Space",
            TopicId::Health => "Health",
            TopicId::Technology => "Technology",
            TopicId::Celebrity => "Celebrity",
            TopicId::Travel => "Travel",
        }
    }

    /// The word used when offering the topic to a user.
    pub fn alias(self) -> &'static str {
        match self {
            TopicId::Space => "Cosmos",
            TopicId::Animal => "animals",
            other => other.feed_tag(),
        }
    }

    /// Tag of the news feed entries that serve this topic.
    pub fn feed_tag(self) -> &'static str {
        match self {
            TopicId::Basketball => "basketball",
            TopicId::Hockey => "hockey",
            TopicId::Soccer => "soccer",
            TopicId::Animal => "animal",
            TopicId::Football => "football",
            TopicId::Science => "science",
            TopicId::Baseball => "baseball",
            TopicId::Space => "space",
            TopicId::Health => "health",
            TopicId::Technology => "technology",
            TopicId::Celebrity => "celebrity",
            TopicId::Travel => "travel",
        }
    }

    /// Words that name the topic in a user utterance.
    pub fn keywords(self) -> &'static [&'static str] {
        match self {
            TopicId::Basketball => &["basketball", "nba"],
            TopicId::Hockey => &["hockey", "nhl"],
            TopicId::Soccer => &["soccer"],
            TopicId::Animal => &["animal", "animals", "wildlife", "pets"],
            TopicId::Football => &["football", "nfl"],
            TopicId::Science => &["science", "scientific", "research"],
            TopicId::Baseball => &["baseball", "mlb"],
            TopicId::Space => &["space", "cosmos", "nasa", "astronomy", "planets"],
            TopicId::Health => &["health", "fitness", "medicine"],
            TopicId::Technology => &["technology", "tech", "gadgets"],
            TopicId::Celebrity => &["celebrity", "celebrities", "hollywood", "gossip"],
            TopicId::Travel => &["travel", "traveling", "vacation", "tourism"],
        }
    }

    /// First topic (in canonical order) whose keyword occurs in `tokens`.
    pub fn mentioned_in<S: AsRef<str>>(tokens: &[S]) -> Option<TopicId> {
        TopicId::ALL.into_iter().find(|t| {
            tokens
                .iter()
                .any(|tok| t.keywords().contains(&tok.as_ref()))
        })
    }

    pub fn from_feed_tag(tag: &str) -> Option<TopicId> {
        TopicId::ALL.into_iter().find(|t| t.feed_tag() == tag)
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopicId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        TopicId::ALL
            .into_iter()
            .find(|t| t.feed_tag() == key || (*t == TopicId::Animal && key == "animals"))
            .ok_or_else(|| Error::Input(format!("unknown topic '{s}'")))
    }
}

/// Keyword sets over entity descriptions, each pointing at a topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityTopicMap {
    entries: Vec<(Vec<String>, TopicId)>,
}

impl EntityTopicMap {
    pub fn new(entries: Vec<(Vec<String>, TopicId)>) -> Result<Self> {
        let map = Self {
            entries: entries
                .into_iter()
                .map(|(ks, t)| (ks.into_iter().map(|k| k.to_lowercase()).collect(), t))
                .collect(),
        };
        let missing: Vec<&str> = TopicId::ALL
            .iter()
            .filter(|t| {
                !map.entries
                    .iter()
                    .any(|(ks, topic)| topic == *t && !ks.is_empty())
            })
            .map(|t| t.name())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "entity-topic map has no keywords for {}",
                missing.join(", ")
            )));
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// One line per topic: comma-separated keywords, tab, topic name.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (line, row) in data_lines(text) {
            let (keywords, topic) = row
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line, "expected keywords<TAB>topic"))?;
            let topic: TopicId = topic
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(origin, line, e.to_string()))?;
            let keywords: Vec<String> = keywords
                .split(',')
                .map(|k| k.trim().to_string())
                .filter(|k| !k.is_empty())
                .collect();
            entries.push((keywords, topic));
        }
        Self::new(entries)
    }

    /// Topic of the first entry with a keyword among the description's tokens.
    pub fn topic_for(&self, description: &str) -> Option<TopicId> {
        let tokens = tokenize(description);
        self.entries
            .iter()
            .find(|(ks, _)| ks.iter().any(|k| tokens.contains(k)))
            .map(|(_, t)| *t)
    }
}
