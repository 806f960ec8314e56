use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    join_list, join_with, sentence, string_list, Component, ComponentId, ComponentRequest,
    ComponentResponse,
};
use crate::error::{data_lines, read_to_string};
use crate::text::tokenize;
use crate::{Error, Result};

const TITLE_KEY: &str = "movie.title";
const REMAINING_KEY: &str = "movie.remaining_fields";

const OFFER_DETAILS: &str = "offer_details";
const AWAITING_FIELD: &str = "awaiting_field_choice";
const OFFER_CURRENT: &str = "offer_current";
const AWAITING_TITLE: &str = "awaiting_title";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MovieField {
    Plot,
    Star,
    Producer,
    Rating,
    Director,
    Genre,
    Writer,
}

impl MovieField {
    pub const ALL: [MovieField; 7] = [
        MovieField::Plot,
        MovieField::Star,
        MovieField::Producer,
        MovieField::Rating,
        MovieField::Director,
        MovieField::Genre,
        MovieField::Writer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MovieField::Plot => "plot",
            MovieField::Star => "star",
            MovieField::Producer => "producer",
            MovieField::Rating => "rating",
            MovieField::Director => "director",
            MovieField::Genre => "genre",
            MovieField::Writer => "writer",
        }
    }

    fn keywords(self) -> &'static [&'static str] {
        match self {
            MovieField::Plot => &["plot", "story", "storyline", "synopsis"],
            MovieField::Star => &["star", "stars", "cast", "actor", "actress", "starring"],
            MovieField::Producer => &["producer", "producers", "produced"],
            MovieField::Rating => &["rating", "rated", "score", "ratings"],
            MovieField::Director => &["director", "directed", "directs"],
            MovieField::Genre => &["genre", "kind"],
            MovieField::Writer => &["writer", "wrote", "written", "screenplay"],
        }
    }

    /// Fields named in `tokens`, in canonical order.
    pub fn mentioned_in(tokens: &[String]) -> Vec<MovieField> {
        Self::ALL
            .into_iter()
            .filter(|f| tokens.iter().any(|t| f.keywords().contains(&t.as_str())))
            .collect()
    }

    fn answer(self, title: &str, value: &str) -> String {
        match self {
            MovieField::Plot => sentence(value),
            MovieField::Star => format!("{title} stars {value}."),
            MovieField::Producer => format!("It was produced by {value}."),
            MovieField::Rating => format!("{title} is rated {value}."),
            MovieField::Director => format!("It was directed by {value}."),
            MovieField::Genre => format!("Its genre is {}.", value.to_lowercase()),
            MovieField::Writer => format!("It was written by {value}."),
        }
    }
}

impl fmt::Display for MovieField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MovieField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Input(format!("unknown movie field '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recency {
    Current,
    Catalog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub title: String,
    pub recency: Recency,
    pub year: Option<u16>,
    pub fields: BTreeMap<MovieField, String>,
}

impl MovieRecord {
    pub fn field(&self, field: MovieField) -> Option<&str> {
        self.fields.get(&field).map(String::as_str)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MovieDb {
    movies: Vec<MovieRecord>,
}

impl MovieDb {
    pub fn new(movies: Vec<MovieRecord>) -> Self {
        Self { movies }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// `title<TAB>key=value;key=value` with keys `status`, `year` and the
    /// field names.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut movies = Vec::new();
        for (line, content) in data_lines(text) {
            let err = |m: String| Error::parse(origin, line, m);
            let (title, rest) = content
                .split_once('\t')
                .ok_or_else(|| err("expected title<TAB>attributes".into()))?;
            let mut record = MovieRecord {
                title: title.trim().to_string(),
                recency: Recency::Catalog,
                year: None,
                fields: BTreeMap::new(),
            };
            for pair in rest.split(';').filter(|p| !p.trim().is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| err(format!("attribute '{pair}' has no '='")))?;
                let (k, v) = (k.trim(), v.trim().to_string());
                match k {
                    "status" => {
                        record.recency = match v.as_str() {
                            "current" => Recency::Current,
                            "catalog" => Recency::Catalog,
                            other => return Err(err(format!("unknown status '{other}'"))),
                        }
                    }
                    "year" => {
                        record.year = Some(v.parse().map_err(|_| err(format!("bad year '{v}'")))?)
                    }
                    field => {
                        let field = field
                            .parse::<MovieField>()
                            .map_err(|e| err(e.to_string()))?;
                        record.fields.insert(field, v);
                    }
                }
            }
            movies.push(record);
        }
        Ok(Self { movies })
    }

    pub fn movies(&self) -> &[MovieRecord] {
        &self.movies
    }

    pub fn get(&self, title: &str) -> Option<&MovieRecord> {
        let wanted = tokenize(title);
        self.movies.iter().find(|m| tokenize(&m.title) == wanted)
    }

    /// Longest title occurring in `tokens`.
    pub fn find_in(&self, tokens: &[String]) -> Option<&MovieRecord> {
        self.movies
            .iter()
            .map(|m| (m, tokenize(&m.title)))
            .filter(|(_, words)| {
                !words.is_empty() && tokens.windows(words.len()).any(|w| w == &words[..])
            })
            .max_by_key(|(_, words)| words.len())
            .map(|(m, _)| m)
    }

    /// Titles currently showing, optionally limited to a genre.
    pub fn current(&self, genre: Option<&str>, except: &str) -> Vec<&str> {
        self.movies
            .iter()
            .filter(|m| m.recency == Recency::Current && m.title != except)
            .filter(|m| {
                genre.is_none_or(|g| {
                    m.field(MovieField::Genre)
                        .is_some_and(|mg| mg.eq_ignore_ascii_case(g))
                })
            })
            .map(|m| m.title.as_str())
            .collect()
    }
}

pub struct MoviesComponent {
    db: MovieDb,
}

impl MoviesComponent {
    pub fn new(db: MovieDb) -> Self {
        Self { db }
    }

    fn introduce(&self, movie: &MovieRecord) -> ComponentResponse {
        let genre = movie.field(MovieField::Genre);
        let mut body = match (movie.year, genre) {
            (Some(y), Some(g)) => format!("{} is a {y} {} film.", movie.title, g.to_lowercase()),
            (None, Some(g)) => format!("{} is a {} film.", movie.title, g.to_lowercase()),
            (Some(y), None) => format!("{} came out in {y}.", movie.title),
            (None, None) => format!("I know a little about {}.", movie.title),
        };
        let others = self.db.current(genre, &movie.title);
        if let (Some(g), false) = (genre, others.is_empty()) {
            body.push_str(&format!(
                " Other {} films out recently are {}.",
                g.to_lowercase(),
                join_list(&others)
            ));
        }
        ComponentResponse::offer(
            &body,
            &format!("Would you like to know more about {}?", movie.title),
            ComponentId::Movies,
            OFFER_DETAILS,
        )
        .with_cache(TITLE_KEY, json!(movie.title))
        .with_cache(REMAINING_KEY, Value::Null)
    }

    fn field_menu(
        body: &str,
        movie: &MovieRecord,
        remaining: &[MovieField],
        first: bool,
    ) -> ComponentResponse {
        let names: Vec<&str> = remaining.iter().map(|f| f.name()).collect();
        let prompt = if first {
            format!(
                "I can tell you about its {}. Which would you like?",
                join_with(&names, "or")
            )
        } else {
            format!(
                "I can also tell you about its {}. Which one?",
                join_with(&names, "or")
            )
        };
        ComponentResponse::offer(body, &prompt, ComponentId::Movies, AWAITING_FIELD)
            .with_cache(TITLE_KEY, json!(movie.title))
            .with_cache(REMAINING_KEY, json!(names))
    }

    fn offer_current(body: &str) -> ComponentResponse {
        ComponentResponse::offer(
            body,
            "Would you like to hear what else is in theaters now?",
            ComponentId::Movies,
            OFFER_CURRENT,
        )
        .with_cache(REMAINING_KEY, Value::Null)
    }

    fn fields_of(movie: &MovieRecord) -> Vec<MovieField> {
        MovieField::ALL
            .into_iter()
            .filter(|f| movie.fields.contains_key(f))
            .collect()
    }

    fn choose_field(
        &self,
        request: &ComponentRequest<'_>,
        movie: &MovieRecord,
    ) -> ComponentResponse {
        let mut remaining: Vec<MovieField> = string_list(request.cache(REMAINING_KEY))
            .iter()
            .filter_map(|n| n.parse().ok())
            .collect();
        if remaining.is_empty() {
            remaining = Self::fields_of(movie);
        }
        let asked: Vec<MovieField> = MovieField::mentioned_in(request.tokens)
            .into_iter()
            .filter(|f| movie.fields.contains_key(f))
            .collect();
        if asked.is_empty() {
            if request.is_negative() {
                return Self::offer_current("Okay.");
            }
            return Self::field_menu(
                "Sorry, I didn't catch which detail.",
                movie,
                &remaining,
                true,
            );
        }
        let body: Vec<String> = asked
            .iter()
            .map(|&f| f.answer(&movie.title, movie.field(f).unwrap_or_default()))
            .collect();
        remaining.retain(|f| !asked.contains(f));
        if remaining.is_empty() {
            Self::offer_current(&body.join(" "))
        } else {
            Self::field_menu(&body.join(" "), movie, &remaining, false)
        }
    }
}

impl Component for MoviesComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Movies
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let named = self
            .db
            .find_in(request.tokens)
            .or_else(|| request.entity().and_then(|e| self.db.get(e)));
        let current = request
            .cache(TITLE_KEY)
            .and_then(Value::as_str)
            .and_then(|t| self.db.get(t));

        match (request.sub_state(), named, current) {
            (Some(OFFER_DETAILS), None, Some(movie)) => {
                if request.is_negative() {
                    Self::offer_current("Alright.")
                } else {
                    Self::field_menu("", movie, &Self::fields_of(movie), true)
                }
            }
            (Some(AWAITING_FIELD), None, Some(movie)) => self.choose_field(request, movie),
            (Some(AWAITING_FIELD), Some(movie), Some(cur)) if movie.title == cur.title => {
                self.choose_field(request, movie)
            }
            (Some(OFFER_CURRENT), None, _) if request.is_negative() => {
                ComponentResponse::say("Alright, maybe another time.")
                    .with_cache(TITLE_KEY, Value::Null)
            }
            (Some(OFFER_CURRENT), None, cur) => {
                let showing = self.db.current(None, cur.map_or("", |m| m.title.as_str()));
                let mut r = ComponentResponse::say(format!(
                    "Films in theaters now include {}. Which one would you like to hear about?",
                    join_list(&showing)
                ));
                r.sub_state = Some(AWAITING_TITLE.into());
                r
            }
            (_, Some(movie), _) => self.introduce(movie),
            _ if MovieField::mentioned_in(request.tokens).is_empty()
                && !request
                    .tokens
                    .iter()
                    .any(|t| matches!(t.as_str(), "about" | "called" | "named")) =>
            {
                let showing = self.db.current(None, "");
                let mut r = ComponentResponse::say(format!(
                    "Some films out right now are {}. Which one would you like to hear about?",
                    join_list(&showing)
                ));
                r.sub_state = Some(AWAITING_TITLE.into());
                r
            }
            _ => Self::offer_current("I couldn't find that film in my database."),
        }
    }
}
