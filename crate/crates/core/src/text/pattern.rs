use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::error::{data_lines, read_to_string};
use crate::{Error, Result};

/// Wildcard symbol used by syntactic feature rules.
pub const RULE_WILDCARD: &str = "X";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternToken {
    Literal(String),
    Wildcard,
}

/// A token-level pattern made of literals and wildcards. Each wildcard
/// absorbs one or more tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WildcardPattern {
    tokens: Vec<PatternToken>,
}

impl WildcardPattern {
    /// Parses a whitespace-separated template in which words equal to
    /// `wildcard` become wildcards and everything else is tokenized into
    /// literals.
    pub fn parse(template: &str, wildcard: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for word in template.split_whitespace() {
            if word == wildcard {
                tokens.push(PatternToken::Wildcard);
            } else {
                tokens.extend(tokenize(word).into_iter().map(PatternToken::Literal));
            }
        }
        if tokens.is_empty() {
            return Err(Error::Input(format!("empty pattern '{template}'")));
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[PatternToken] {
        &self.tokens
    }

    pub fn wildcard_count(&self) -> usize {
        self.tokens
            .iter()
            .filter(|t| matches!(t, PatternToken::Wildcard))
            .count()
    }

    pub fn literal_count(&self) -> usize {
        self.tokens.len() - self.wildcard_count()
    }

    /// Matches the whole token list. On success returns one capture per
    /// wildcard; earlier wildcards take as few tokens as possible.
    pub fn captures<S: AsRef<str>>(&self, input: &[S]) -> Option<Vec<Vec<String>>> {
        let mut spans = Vec::new();
        if match_from(&self.tokens, input, &mut spans, true) {
            Some(
                spans
                    .into_iter()
                    .map(|(a, b)| input[a..b].iter().map(|s| s.as_ref().to_string()).collect())
                    .collect(),
            )
        } else {
            None
        }
    }

    /// True when the pattern matches some contiguous window of `input`.
    pub fn is_found_in<S: AsRef<str>>(&self, input: &[S]) -> bool {
        (0..input.len()).any(|start| {
            let mut spans = Vec::new();
            match_from(&self.tokens, &input[start..], &mut spans, false)
        })
    }
}

/// Backtracking matcher. Spans are recorded relative to the slice that was
/// originally passed in at depth zero.
fn match_from<S: AsRef<str>>(
    pattern: &[PatternToken],
    input: &[S],
    spans: &mut Vec<(usize, usize)>,
    anchored_end: bool,
) -> bool {
    fn go<S: AsRef<str>>(
        pattern: &[PatternToken],
        input: &[S],
        pos: usize,
        spans: &mut Vec<(usize, usize)>,
        anchored_end: bool,
    ) -> bool {
        let Some((head, rest)) = pattern.split_first() else {
            return !anchored_end || pos == input.len();
        };
        match head {
            PatternToken::Literal(lit) => {
                pos < input.len()
                    && input[pos].as_ref() == lit
                    && go(rest, input, pos + 1, spans, anchored_end)
            }
            PatternToken::Wildcard => {
                for end in pos + 1..=input.len() {
                    spans.push((pos, end));
                    if go(rest, input, end, spans, anchored_end) {
                        return true;
                    }
                    spans.pop();
                }
                false
            }
        }
    }
    go(pattern, input, 0, spans, anchored_end)
}

/// One syntactic feature: the flag at `flag_index` is set when `pattern`
/// occurs in the utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRule {
    pub id: String,
    pub template: String,
    pub flag_index: usize,
    pattern: WildcardPattern,
}

impl PatternRule {
    pub fn new(
        id: impl Into<String>,
        template: impl Into<String>,
        flag_index: usize,
    ) -> Result<Self> {
        let template = template.into();
        let pattern = WildcardPattern::parse(&template, RULE_WILDCARD)?;
        if pattern.wildcard_count() > 1 {
            return Err(Error::Input(format!(
                "rule template '{template}' has more than one wildcard"
            )));
        }
        if pattern.literal_count() == 0 {
            return Err(Error::Input(format!(
                "rule template '{template}' has no literal"
            )));
        }
        Ok(Self {
            id: id.into(),
            template,
            flag_index,
            pattern,
        })
    }

    pub fn pattern(&self) -> &WildcardPattern {
        &self.pattern
    }

    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        self.pattern.is_found_in(tokens)
    }
}

/// Binary syntactic block: one entry per rule, ordered by `flag_index`.
pub fn match_patterns<S: AsRef<str>>(rules: &[PatternRule], tokens: &[S]) -> Vec<u8> {
    let width = rules.iter().map(|r| r.flag_index + 1).max().unwrap_or(0);
    let mut flags = vec![0u8; width];
    for rule in rules {
        if rule.matches(tokens) {
            flags[rule.flag_index] = 1;
        }
    }
    flags
}

/// Ordered set of syntactic rules loaded from `id<TAB>template` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    rules: Vec<PatternRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<PatternRule>) -> Result<Self> {
        let mut ids = HashSet::new();
        let mut flags = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::Config(format!("duplicate rule id '{}'", r.id)));
            }
            if !flags.insert(r.flag_index) {
                return Err(Error::Config(format!(
                    "duplicate flag index {}",
                    r.flag_index
                )));
            }
        }
        Ok(Self { rules })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut rules = Vec::new();
        for (line_no, line) in data_lines(text) {
            let (id, template) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line_no, "expected 'id<TAB>template'"))?;
            let rule = PatternRule::new(id.trim(), template.trim(), rules.len())
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
            rules.push(rule);
        }
        Self::new(rules).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn rules(&self) -> &[PatternRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn flags<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u8> {
        let mut flags = match_patterns(&self.rules, tokens);
        flags.resize(self.len().max(flags.len()), 0);
        flags
    }
}
