use std::collections::HashMap;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{KnowledgeClient, KnowledgeHit, KnowledgeSource};
use crate::error::{data_lines, read_to_string};
use crate::text::tokenize;
use crate::{Error, Result};

/// An entity found in an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMention {
    /// Canonical surface form from the gazetteer.
    pub surface: String,
    /// Token index range within the utterance.
    pub span: Range<usize>,
    pub description: String,
    pub source: KnowledgeSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub surface: String,
    pub description: String,
}

/// Known entity surfaces with short type descriptions.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    by_key: HashMap<String, usize>,
    longest: usize,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self> {
        let mut gazetteer = Gazetteer::default();
        for entry in entries {
            gazetteer.insert(entry)?;
        }
        Ok(gazetteer)
    }

    fn insert(&mut self, entry: GazetteerEntry) -> Result<()> {
        let tokens = tokenize(&entry.surface);
        if tokens.is_empty() {
            return Err(Error::Config(format!(
                "gazetteer surface '{}' has no tokens",
                entry.surface
            )));
        }
        if entry.description.trim().is_empty() {
            return Err(Error::Config(format!(
                "gazetteer entry '{}' has no description",
                entry.surface
            )));
        }
        let key = tokens.join(" ");
        if self.by_key.contains_key(&key) {
            return Err(Error::Config(format!(
                "duplicate gazetteer surface '{}'",
                entry.surface
            )));
        }
        self.longest = self.longest.max(tokens.len());
        self.by_key.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// One entry per line: surface, tab, description.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut gazetteer = Gazetteer::default();
        for (line, row) in data_lines(text) {
            let (surface, description) = row
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line, "expected surface<TAB>description"))?;
            gazetteer
                .insert(GazetteerEntry {
                    surface: surface.trim().to_string(),
                    description: description.trim().to_string(),
                })
                .map_err(|e| Error::parse(origin, line, e.to_string()))?;
        }
        Ok(gazetteer)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive lookup by surface form.
    pub fn get(&self, surface: &str) -> Option<&GazetteerEntry> {
        self.by_key
            .get(&tokenize(surface).join(" "))
            .map(|&i| &self.entries[i])
    }

    /// Greedy longest match, left to right, without overlaps.
    pub fn detect_entities<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<EntityMention> {
        let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
        let mut mentions = Vec::new();
        let mut start = 0;
        while start < tokens.len() {
            let max = self.longest.min(tokens.len() - start);
            let hit = (1..=max).rev().find_map(|len| {
                self.by_key
                    .get(&tokens[start..start + len].join(" "))
                    .map(|&i| (len, &self.entries[i]))
            });
            match hit {
                Some((len, entry)) => {
                    mentions.push(EntityMention {
                        surface: entry.surface.clone(),
                        span: start..start + len,
                        description: entry.description.clone(),
                        source: KnowledgeSource::Gazetteer,
                    });
                    start += len;
                }
                None => start += 1,
            }
        }
        mentions
    }
}

impl KnowledgeClient for Gazetteer {
    fn lookup(&self, surface: &str) -> Result<Option<KnowledgeHit>> {
        Ok(self.get(surface).map(|e| KnowledgeHit {
            description: e.description.clone(),
            confidence: 1.0,
            source: KnowledgeSource::Gazetteer,
        }))
    }
}
