use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{sentence, Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::error::{data_lines, read_to_string};
use crate::remote::HttpJson;
use crate::text::tokenize;
use crate::{Error, Result};

pub const WIKI_INTRO: &str = "Here is what I got from Wikipedia.";
const LAST_KEY: &str = "wiki.last";

pub trait WikiClient: Send + Sync {
    /// Summary paragraph for `title`, `None` when there is no article.
    fn summary(&self, title: &str) -> Result<Option<String>>;
}

fn key(title: &str) -> String {
    tokenize(title).join(" ")
}

/// Summaries from a `title<TAB>summary` file, matched case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct FixtureWiki {
    pages: HashMap<String, String>,
}

impl FixtureWiki {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut pages = HashMap::new();
        for (line, content) in data_lines(text) {
            let (title, summary) = content
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line, "expected title<TAB>summary"))?;
            pages.insert(key(title), summary.trim().to_string());
        }
        Ok(Self { pages })
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }
}

impl WikiClient for FixtureWiki {
    fn summary(&self, title: &str) -> Result<Option<String>> {
        Ok(self.pages.get(&key(title)).cloned())
    }
}

/// Queries `GET endpoint?title=...` expecting `{"extract": "..."}`.
#[derive(Debug, Clone)]
pub struct RemoteWiki {
    http: HttpJson,
}

#[derive(Deserialize)]
struct Extract {
    extract: String,
}

impl RemoteWiki {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        Self {
            http: HttpJson::new(endpoint, timeout),
        }
    }
}

impl WikiClient for RemoteWiki {
    fn summary(&self, title: &str) -> Result<Option<String>> {
        self.http
            .get::<Extract>(&[("title", title)])
            .map(|r| r.map(|e| e.extract).filter(|e| !e.trim().is_empty()))
            .map_err(|m| {
                Error::Input(format!(
                    "wiki request to {} failed: {m}",
                    self.http.endpoint()
                ))
            })
    }
}

const SUBJECT_MARKERS: [&str; 8] = ["about", "is", "are", "was", "were", "of", "on", "regarding"];

/// The words after the last subject marker ("who is X", "tell me about X").
pub(crate) fn subject_of(tokens: &[String]) -> Option<String> {
    let start = tokens
        .iter()
        .rposition(|t| SUBJECT_MARKERS.contains(&t.as_str()))
        .map_or(0, |i| i + 1);
    let rest: Vec<&str> = tokens[start..]
        .iter()
        .map(String::as_str)
        .filter(|t| !matches!(*t, "the" | "a" | "an"))
        .collect();
    (!rest.is_empty()).then(|| rest.join(" "))
}

pub struct WikiComponent {
    client: Box<dyn WikiClient>,
}

impl WikiComponent {
    pub fn new(client: Box<dyn WikiClient>) -> Self {
        Self { client }
    }
}

impl Component for WikiComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Wiki
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let Some(subject) = request
            .entity()
            .map(str::to_string)
            .or_else(|| subject_of(request.tokens))
        else {
            return ComponentResponse::say("What would you like me to look up?");
        };
        match self.client.summary(&subject) {
            Ok(Some(summary)) => {
                ComponentResponse::say(format!("{WIKI_INTRO} {}", sentence(&summary)))
                    .with_cache(LAST_KEY, json!(subject))
            }
            Ok(None) => ComponentResponse::say(format!(
                "Sorry, I couldn't find an article about {subject}."
            )),
            Err(e) => ComponentResponse::say(
                "Sorry, I can't reach Wikipedia right now. Maybe ask me again later.",
            )
            .with_error(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::testing::session;
    use crate::components::testing::turn;
    use crate::intent::IntentLabel;
    use crate::remote::serve_canned;

    fn fixture() -> FixtureWiki {
        FixtureWiki::parse(
            "Mars\tMars is a planet.\nJim Bridenstine\tA person\n",
            Path::new("w.tsv"),
        )
        .unwrap()
    }

    #[test]
    fn subject_extraction() {
        let s = |t: &str| subject_of(&tokenize(t));
        assert_eq!(
            s("Who is Jim Bridenstine?").as_deref(),
            Some("jim bridenstine")
        );
        assert_eq!(
            s("tell me about the Eiffel Tower").as_deref(),
            Some("eiffel tower")
        );
        assert_eq!(s("platypus").as_deref(), Some("platypus"));
        assert_eq!(s("what is").as_deref(), None);
    }

    #[test]
    fn fixture_lookup_ignores_case_and_punctuation() {
        let w = fixture();
        assert_eq!(
            w.summary("MARS").unwrap().as_deref(),
            Some("Mars is a planet.")
        );
        assert_eq!(
            w.summary("jim  bridenstine?").unwrap().as_deref(),
            Some("A person")
        );
        assert_eq!(w.summary("Venus").unwrap(), None);
    }

    #[test]
    fn responses_start_with_the_source() {
        let c = WikiComponent::new(Box::new(fixture()));
        let mut s = session();
        let r = turn(&c, &mut s, IntentLabel::Wiki, "Who is Jim Bridenstine?");
        assert_eq!(r.text, "Here is what I got from Wikipedia. A person.");
        let r = turn(&c, &mut s, IntentLabel::Wiki, "what is a quasar");
        assert!(r.text.contains("quasar"));
        assert!(r.error.is_none());
    }

    #[test]
    fn remote_client_and_failure_fallback() {
        let url = serve_canned(vec![
            (200, r#"{"extract":"Remote text."}"#.into()),
            (404, "{}".into()),
            (500, "{}".into()),
        ]);
        let remote = RemoteWiki::new(url, Duration::from_secs(2));
        assert_eq!(
            remote.summary("x").unwrap().as_deref(),
            Some("Remote text.")
        );
        assert_eq!(remote.summary("y").unwrap(), None);
        let c = WikiComponent::new(Box::new(remote));
        let r = turn(&c, &mut session(), IntentLabel::Wiki, "who is z");
        assert!(r.text.starts_with("Sorry"));
        assert!(r.error.is_some());
    }
}
