use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    string_list, Component, ComponentId, ComponentRequest, ComponentResponse, TOPIC_OFFER,
};
use crate::transition::TopicId;
use crate::{Error, Result};

/// Feed tag served when the user asks for news without naming a topic.
pub const HEADLINES_TAG: &str = "headlines";
const TOPIC_KEY: &str = "news.topic";
const SERVED_KEY: &str = "news.served";
const ANOTHER: &str = "Would you like another one?";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsItem {
    pub tag: String,
    pub title: String,
    pub summary: String,
    pub link: Option<String>,
    pub published: DateTime<Utc>,
}

/// Result of reading one feed document.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    /// Newest first.
    pub items: Vec<NewsItem>,
    /// Entries skipped for a missing title or unreadable date.
    pub dropped: usize,
}

#[derive(Default)]
struct Draft {
    title: Option<String>,
    summary: Option<String>,
    link: Option<String>,
    date: Option<String>,
}

impl Draft {
    fn finish(self, tag: &str) -> Option<NewsItem> {
        let title = self.title.filter(|t| !t.trim().is_empty())?;
        let published = parse_date(self.date.as_deref()?)?;
        Some(NewsItem {
            tag: tag.to_string(),
            title: title.trim().to_string(),
            summary: strip_markup(self.summary.as_deref().unwrap_or_default()),
            link: self.link,
            published,
        })
    }
}

fn parse_date(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    DateTime::parse_from_rfc2822(raw)
        .or_else(|_| DateTime::parse_from_rfc3339(raw))
        .ok()
        .map(|d| d.with_timezone(&Utc))
}

fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_tag = false;
    for c in text.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            c if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn href(e: &BytesStart<'_>) -> Option<String> {
    e.try_get_attribute("href")
        .ok()
        .flatten()
        .and_then(|a| a.unescape_value().ok().map(|v| v.into_owned()))
}

/// Parses an RSS 2.0 or Atom document into items tagged `tag`.
pub fn ingest_feed(xml: &str, tag: &str) -> Result<Ingested> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);
    let feed_error = |reader: &Reader<&[u8]>, message: String| Error::Feed {
        offset: reader.buffer_position(),
        message,
    };

    let mut depth = 0usize;
    let mut saw_root = false;
    let mut draft: Option<Draft> = None;
    let mut field: Option<String> = None;
    let mut text = String::new();
    let mut items = Vec::new();
    let mut dropped = 0;

    loop {
        let event = reader.read_event().map_err(|e| Error::Feed {
            offset: reader.error_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(e) => {
                depth += 1;
                let name = String::from_utf8_lossy(e.local_name().as_ref()).to_lowercase();
                if depth == 1 {
                    if name != "rss" && name != "feed" {
                        return Err(feed_error(
                            &reader,
                            format!("unexpected root element <{name}>"),
                        ));
                    }
                    saw_root = true;
                }
                match (&mut draft, name.as_str()) {
                    (None, "item" | "entry") => draft = Some(Draft::default()),
                    (Some(d), "link") if d.link.is_none() => {
                        d.link = href(&e);
                        field = Some(name);
                    }
                    (Some(_), _) => field = Some(name),
                    _ => {}
                }
                text.clear();
            }
            Event::Empty(e) => {
                let name = String::from_utf8_lossy(e.local_name().as_ref()).to_lowercase();
                if let (Some(d), "link") = (&mut draft, name.as_str()) {
                    if d.link.is_none() {
                        d.link = href(&e);
                    }
                }
            }
            Event::Text(t) => {
                let piece = t
                    .unescape()
                    .map_err(|e| feed_error(&reader, e.to_string()))?;
                text.push_str(&piece);
            }
            Event::CData(c) => text.push_str(&String::from_utf8_lossy(&c)),
            Event::End(e) => {
                depth = depth.saturating_sub(1);
                let name = String::from_utf8_lossy(e.local_name().as_ref()).to_lowercase();
                if matches!(name.as_str(), "item" | "entry") {
                    if let Some(d) = draft.take() {
                        match d.finish(tag) {
                            Some(item) => items.push(item),
                            None => dropped += 1,
                        }
                    }
                } else if let (Some(d), Some(f)) = (&mut draft, field.take()) {
                    let value = std::mem::take(&mut text);
                    match f.as_str() {
                        "title" => d.title = Some(value),
                        "description" | "summary" => d.summary = Some(value),
                        "content" if d.summary.is_none() => d.summary = Some(value),
                        "pubdate" | "published" => d.date = Some(value),
                        "updated" if d.date.is_none() => d.date = Some(value),
                        "link" if d.link.is_none() && !value.trim().is_empty() => {
                            d.link = Some(value.trim().to_string())
                        }
                        _ => {}
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err(feed_error(
            &reader,
            "document has no rss or feed element".into(),
        ));
    }
    if depth > 0 {
        return Err(feed_error(
            &reader,
            "document ends inside an open element".into(),
        ));
    }
    items.sort_by_key(|i| std::cmp::Reverse(i.published));
    Ok(Ingested { items, dropped })
}

/// News items by feed tag. Readers see whole snapshots; ingestion swaps
/// in a new one.
#[derive(Debug, Default)]
pub struct FeedStore {
    current: RwLock<Arc<BTreeMap<String, Vec<NewsItem>>>>,
}

impl FeedStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `<tag>.xml` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let store = Self::new();
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "xml"))
            .collect();
        entries.sort();
        for path in entries {
            let tag = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let xml = crate::error::read_to_string(&path)?;
            store.replace(&tag, ingest_feed(&xml, &tag)?.items);
        }
        Ok(store)
    }

    pub fn snapshot(&self) -> Arc<BTreeMap<String, Vec<NewsItem>>> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Replaces the items for `tag` in one step.
    pub fn replace(&self, tag: &str, items: Vec<NewsItem>) {
        let mut guard = self.current.write().unwrap_or_else(|e| e.into_inner());
        let mut next = (**guard).clone();
        next.insert(tag.to_string(), items);
        *guard = Arc::new(next);
    }

    pub fn ingest(&self, xml: &str, tag: &str) -> Result<Ingested> {
        let ingested = ingest_feed(xml, tag)?;
        self.replace(tag, ingested.items.clone());
        Ok(ingested)
    }

    pub fn tags(&self) -> Vec<String> {
        self.snapshot().keys().cloned().collect()
    }
}

pub struct NewsComponent {
    store: Arc<FeedStore>,
}

impl NewsComponent {
    pub fn new(store: Arc<FeedStore>) -> Self {
        Self { store }
    }

    pub fn store(&self) -> &Arc<FeedStore> {
        &self.store
    }

    fn intro(topic: Option<TopicId>) -> String {
        match topic {
            Some(t) => format!("Here's a recent {} story.", t.feed_tag()),
            None => "Here's one of today's headlines.".to_string(),
        }
    }
}

impl Component for NewsComponent {
    fn id(&self) -> ComponentId {
        ComponentId::News
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let continuing = request.sub_state() == Some("offer_another");
        if continuing && request.is_negative() {
            return ComponentResponse::say("Okay, that's enough news for now.")
                .with_cache(SERVED_KEY, Value::Null);
        }
        let cached_topic = request
            .cache(TOPIC_KEY)
            .and_then(Value::as_str)
            .and_then(TopicId::from_feed_tag);
        let named = request
            .route
            .topic
            .or_else(|| TopicId::mentioned_in(request.tokens));
        let topic = match named {
            Some(t) => Some(t),
            None if continuing => cached_topic,
            None => None,
        };
        let same_topic = continuing && topic == cached_topic;
        let mut served = if same_topic {
            string_list(request.cache(SERVED_KEY))
        } else {
            Vec::new()
        };

        let tag = topic.map_or(HEADLINES_TAG, TopicId::feed_tag);
        let snapshot = self.store.snapshot();
        let next = snapshot
            .get(tag)
            .and_then(|items| items.iter().find(|i| !served.contains(&i.title)));
        let topic_value = topic.map_or(Value::Null, |t| json!(t.feed_tag()));
        match next {
            Some(item) => {
                served.push(item.title.clone());
                let body = format!(
                    "{} {}. {}",
                    Self::intro(topic),
                    item.title.trim_end_matches('.'),
                    item.summary
                );
                ComponentResponse::offer(
                    body.trim_end(),
                    ANOTHER,
                    ComponentId::News,
                    "offer_another",
                )
                .with_cache(TOPIC_KEY, topic_value)
                .with_cache(SERVED_KEY, json!(served))
                .with_topic(topic)
            }
            None if !served.is_empty() => ComponentResponse::say(format!(
                "That's all the {} news I have right now.",
                topic.map_or("latest", TopicId::feed_tag)
            ))
            .with_cache(SERVED_KEY, Value::Null)
            .with_topic(topic),
            None => ComponentResponse::offer(
                &format!(
                    "I don't have any {} news at the moment.",
                    topic.map_or("fresh", TopicId::feed_tag)
                ),
                TOPIC_OFFER,
                ComponentId::Transition,
                "offer_topics",
            )
            .with_topic(topic),
        }
    }
}
