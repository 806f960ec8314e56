use std::path::Path;

use super::{Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::error::{data_lines, read_to_string};
use crate::text::{tokenize, WildcardPattern};
use crate::{Error, Result};

/// Wildcard symbol in small-talk patterns.
pub const TEMPLATE_WILDCARD: &str = "*";

const FALLBACK: &str = "I'm not sure what to say to that, but I'm happy to keep chatting.";

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub pattern: WildcardPattern,
    /// May reference captures as `{1}`, `{2}`, ...
    pub response: String,
}

impl Template {
    pub fn render(&self, captures: &[Vec<String>]) -> String {
        let mut out = self.response.clone();
        for (i, words) in captures.iter().enumerate() {
            out = out.replace(&format!("{{{}}}", i + 1), &words.join(" "));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemplateSet {
    templates: Vec<Template>,
}

impl TemplateSet {
    pub fn new(templates: Vec<Template>) -> Self {
        Self { templates }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// `pattern<TAB>response` per line.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut templates = Vec::new();
        for (line, content) in data_lines(text) {
            let (pattern, response) = content
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line, "expected pattern<TAB>response"))?;
            let pattern = WildcardPattern::parse(pattern, TEMPLATE_WILDCARD)
                .map_err(|e| Error::parse(origin, line, e.to_string()))?;
            templates.push(Template {
                pattern,
                response: response.trim().to_string(),
            });
        }
        Ok(Self { templates })
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Best matching template: exact patterns first, then fewer wildcards,
    /// then file order.
    pub fn find<S: AsRef<str>>(&self, tokens: &[S]) -> Option<String> {
        self.templates
            .iter()
            .filter_map(|t| t.pattern.captures(tokens).map(|c| (t, c)))
            .min_by_key(|(t, _)| t.pattern.wildcard_count())
            .map(|(t, c)| t.render(&c))
    }
}

pub struct SmallTalkComponent {
    templates: TemplateSet,
}

impl SmallTalkComponent {
    pub fn new(templates: TemplateSet) -> Self {
        Self { templates }
    }

    pub fn reply(&self, text: &str) -> String {
        self.templates
            .find(&tokenize(text))
            .unwrap_or_else(|| FALLBACK.to_string())
    }
}

impl Component for SmallTalkComponent {
    fn id(&self) -> ComponentId {
        ComponentId::SmallTalk
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        ComponentResponse::say(self.reply(request.resolved_text))
    }
}
