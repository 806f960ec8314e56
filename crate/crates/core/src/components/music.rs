use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{join_list, Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::error::{data_lines, read_to_string};
use crate::text::tokenize;
use crate::{Error, Result};

/// Chart name used when no genre is asked for.
pub const TOP_CHART: &str = "top";
const TOP_SIZE: usize = 5;
const GENRE_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub chart: String,
    pub title: String,
    pub artist: String,
}

impl ChartEntry {
    fn describe(&self) -> String {
        format!("{} by {}", self.title, self.artist)
    }
}

/// Song charts in rank order, one per genre plus the overall chart.
#[derive(Debug, Clone, Default)]
pub struct MusicCharts {
    entries: Vec<ChartEntry>,
}

impl MusicCharts {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// `chart<TAB>title<TAB>artist` per line, best ranked first.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let entries = data_lines(text)
            .map(
                |(line, content)| match content.split('\t').map(str::trim).collect::<Vec<_>>()[..] {
                    [chart, title, artist] => Ok(ChartEntry {
                        chart: chart.to_lowercase(),
                        title: title.to_string(),
                        artist: artist.to_string(),
                    }),
                    _ => Err(Error::parse(
                        origin,
                        line,
                        "expected chart<TAB>title<TAB>artist",
                    )),
                },
            )
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn chart(&self, name: &str) -> Vec<&ChartEntry> {
        self.entries.iter().filter(|e| e.chart == name).collect()
    }

    /// Genre chart named in `tokens`, longest name first.
    pub fn genre_in(&self, tokens: &[String]) -> Option<&str> {
        let mut names: Vec<&str> = self
            .entries
            .iter()
            .map(|e| e.chart.as_str())
            .filter(|c| *c != TOP_CHART)
            .collect();
        names.dedup();
        names
            .into_iter()
            .map(|n| (n, tokenize(n)))
            .filter(|(_, w)| !w.is_empty() && tokens.windows(w.len()).any(|win| win == &w[..]))
            .max_by_key(|(_, w)| w.len())
            .map(|(n, _)| n)
    }

    /// Artist named in `tokens`.
    pub fn artist_in(&self, tokens: &[String]) -> Option<&str> {
        self.entries
            .iter()
            .map(|e| (e.artist.as_str(), tokenize(&e.artist)))
            .filter(|(_, w)| !w.is_empty() && tokens.windows(w.len()).any(|win| win == &w[..]))
            .max_by_key(|(_, w)| w.len())
            .map(|(a, _)| a)
    }

    pub fn by_artist(&self, artist: &str) -> Vec<&ChartEntry> {
        let mut seen = Vec::new();
        for e in self.entries.iter().filter(|e| e.artist == artist) {
            if !seen.iter().any(|s: &&ChartEntry| s.title == e.title) {
                seen.push(e);
            }
        }
        seen
    }
}

pub struct MusicComponent {
    charts: MusicCharts,
}

impl MusicComponent {
    pub fn new(charts: MusicCharts) -> Self {
        Self { charts }
    }
}

fn describe_all(entries: &[&ChartEntry]) -> String {
    join_list(&entries.iter().map(|e| e.describe()).collect::<Vec<_>>())
}

impl Component for MusicComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Music
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        if let Some(genre) = self.charts.genre_in(request.tokens) {
            let songs: Vec<&ChartEntry> = self
                .charts
                .chart(genre)
                .into_iter()
                .take(GENRE_SIZE)
                .collect();
            return ComponentResponse::say(format!(
                "Here are some {genre} songs people are listening to lately: {}.",
                describe_all(&songs)
            ));
        }
        let artist = self.charts.artist_in(request.tokens).or_else(|| {
            request
                .entity()
                .and_then(|e| self.charts.artist_in(&tokenize(e)))
        });
        if let Some(artist) = artist {
            let titles: Vec<&str> = self
                .charts
                .by_artist(artist)
                .iter()
                .map(|e| e.title.as_str())
                .collect();
            return ComponentResponse::say(format!(
                "{artist} is doing well on the charts right now with {}.",
                join_list(&titles)
            ));
        }
        let top: Vec<&ChartEntry> = self
            .charts
            .chart(TOP_CHART)
            .into_iter()
            .take(TOP_SIZE)
            .collect();
        if top.is_empty() {
            return ComponentResponse::say("I don't have any chart information right now.");
        }
        ComponentResponse::say(format!(
            "The most popular songs this week are {}.",
            describe_all(&top)
        ))
    }
}
