use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::liveqa::DEFAULT_QA_THRESHOLD;
use super::*;
use crate::Result;

/// Endpoints for live sources; `None` uses the bundled fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClientSettings {
    pub wiki_endpoint: Option<String>,
    pub weather_endpoint: Option<String>,
    pub timeout_ms: u64,
}

impl Default for ClientSettings {
    fn default() -> Self {
        Self {
            wiki_endpoint: None,
            weather_endpoint: None,
            timeout_ms: 2000,
        }
    }
}

/// One instance of every component.
pub struct Components {
    small_talk: SmallTalkComponent,
    news: NewsComponent,
    wiki: WikiComponent,
    weather: WeatherComponent,
    joke: JokeComponent,
    live_qa: LiveQaComponent,
    movies: MoviesComponent,
    music: MusicComponent,
    opinion: OpinionComponent,
    food: FoodComponent,
    transition: TransitionComponent,
    unrecognized: UnrecognizedComponent,
}

impl Components {
    /// Loads every fixture store from `data_dir`.
    pub fn load(data_dir: &Path, clients: &ClientSettings) -> Result<Self> {
        let timeout = Duration::from_millis(clients.timeout_ms);
        let wiki: Box<dyn WikiClient> = match &clients.wiki_endpoint {
            Some(url) => Box::new(RemoteWiki::new(url.clone(), timeout)),
            None => Box::new(FixtureWiki::load(&data_dir.join("wiki.tsv"))?),
        };
        let weather: Box<dyn WeatherClient> = match &clients.weather_endpoint {
            Some(url) => Box::new(RemoteWeather::new(url.clone(), timeout)),
            None => Box::new(FixtureWeather::load(&data_dir.join("weather.tsv"))?),
        };
        Ok(Self {
            small_talk: SmallTalkComponent::new(TemplateSet::load(
                &data_dir.join("smalltalk.tsv"),
            )?),
            news: NewsComponent::new(Arc::new(FeedStore::load_dir(&data_dir.join("feeds"))?)),
            wiki: WikiComponent::new(wiki),
            weather: WeatherComponent::new(
                weather,
                WeatherComponent::load_cities(&data_dir.join("cities.txt"))?,
            ),
            joke: JokeComponent::load(&data_dir.join("jokes.txt"))?,
            live_qa: LiveQaComponent::load(&data_dir.join("qa.tsv"), DEFAULT_QA_THRESHOLD)?,
            movies: MoviesComponent::new(MovieDb::load(&data_dir.join("movies.tsv"))?),
            music: MusicComponent::new(MusicCharts::load(&data_dir.join("music.tsv"))?),
            opinion: OpinionComponent,
            food: FoodComponent::new(RecipeBook::load(&data_dir.join("recipes.tsv"))?),
            transition: TransitionComponent,
            unrecognized: UnrecognizedComponent,
        })
    }

    pub fn get(&self, id: ComponentId) -> &dyn Component {
        match id {
            ComponentId::SmallTalk => &self.small_talk,
            ComponentId::News => &self.news,
            ComponentId::Wiki => &self.wiki,
            ComponentId::Weather => &self.weather,
            ComponentId::Joke => &self.joke,
            ComponentId::LiveQa => &self.live_qa,
            ComponentId::Movies => &self.movies,
            ComponentId::Music => &self.music,
            ComponentId::Opinion => &self.opinion,
            ComponentId::Food => &self.food,
            ComponentId::Transition => &self.transition,
            ComponentId::Unrecognized => &self.unrecognized,
        }
    }

    pub fn feeds(&self) -> &Arc<FeedStore> {
        self.news.store()
    }
}
