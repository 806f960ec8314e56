use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::error::{data_lines, read_to_string};
use crate::remote::HttpJson;
use crate::text::tokenize;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherReading {
    pub city: String,
    pub condition: String,
    pub temperature_f: i32,
    pub high_f: i32,
    pub low_f: i32,
}

pub trait WeatherClient: Send + Sync {
    fn current(&self, city: &str) -> Result<Option<WeatherReading>>;
}

/// Readings from a `city<TAB>condition<TAB>temp<TAB>high<TAB>low` file.
#[derive(Debug, Clone, Default)]
pub struct FixtureWeather {
    readings: HashMap<String, WeatherReading>,
}

impl FixtureWeather {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut readings = HashMap::new();
        for (line, content) in data_lines(text) {
            let cols: Vec<&str> = content.split('\t').map(str::trim).collect();
            let [city, condition, t, h, l] = cols[..] else {
                return Err(Error::parse(
                    origin,
                    line,
                    "expected 5 tab-separated columns",
                ));
            };
            let num = |s: &str| {
                s.parse::<i32>()
                    .map_err(|_| Error::parse(origin, line, format!("'{s}' is not a temperature")))
            };
            readings.insert(
                tokenize(city).join(" "),
                WeatherReading {
                    city: city.to_string(),
                    condition: condition.to_string(),
                    temperature_f: num(t)?,
                    high_f: num(h)?,
                    low_f: num(l)?,
                },
            );
        }
        Ok(Self { readings })
    }
}

impl WeatherClient for FixtureWeather {
    fn current(&self, city: &str) -> Result<Option<WeatherReading>> {
        Ok(self.readings.get(&tokenize(city).join(" ")).cloned())
    }
}

/// Queries `GET endpoint?city=...` expecting a [`WeatherReading`] object.
#[derive(Debug, Clone)]
pub struct RemoteWeather {
    http: HttpJson,
}

impl RemoteWeather {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        Self {
            http: HttpJson::new(endpoint, timeout),
        }
    }
}

impl WeatherClient for RemoteWeather {
    fn current(&self, city: &str) -> Result<Option<WeatherReading>> {
        self.http
            .get::<WeatherReading>(&[("city", city)])
            .map_err(|m| {
                Error::Input(format!(
                    "weather request to {} failed: {m}",
                    self.http.endpoint()
                ))
            })
    }
}

/// Longest city name (from `cities`) found in `tokens`, leftmost first.
pub fn extract_city(tokens: &[String], cities: &[String]) -> Option<String> {
    let names: Vec<(Vec<String>, &String)> = cities.iter().map(|c| (tokenize(c), c)).collect();
    (0..tokens.len()).find_map(|start| {
        names
            .iter()
            .filter(|(words, _)| !words.is_empty() && tokens[start..].starts_with(words))
            .max_by_key(|(words, _)| words.len())
            .map(|(_, name)| (*name).clone())
    })
}

pub struct WeatherComponent {
    client: Box<dyn WeatherClient>,
    cities: Vec<String>,
}

impl WeatherComponent {
    pub fn new(client: Box<dyn WeatherClient>, cities: Vec<String>) -> Self {
        Self { client, cities }
    }

    /// One city name per line.
    pub fn load_cities(path: &Path) -> Result<Vec<String>> {
        Ok(data_lines(&read_to_string(path)?)
            .map(|(_, l)| l.trim().to_string())
            .collect())
    }
}

impl Component for WeatherComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Weather
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let Some(city) = extract_city(request.tokens, &self.cities) else {
            let mut r = ComponentResponse::say("Which city would you like the weather for?");
            r.sub_state = Some("awaiting_city".into());
            return r;
        };
        match self.client.current(&city) {
            Ok(Some(w)) => ComponentResponse::say(format!(
                "Right now in {} it's {} and {}°F, with a high of {} and a low of {}.",
                w.city,
                w.condition.to_lowercase(),
                w.temperature_f,
                w.high_f,
                w.low_f
            )),
            Ok(None) => {
                ComponentResponse::say(format!("I don't have a forecast for {city} at the moment."))
            }
            Err(e) => {
                ComponentResponse::say("Sorry, the weather service isn't answering right now.")
                    .with_error(e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::testing::{session, turn};
    use crate::intent::IntentLabel;
    use crate::remote::serve_canned;

    fn cities() -> Vec<String> {
        ["York", "New York", "Boston", "Salt Lake City"]
            .map(String::from)
            .to_vec()
    }

    #[test]
    fn longest_city_wins() {
        let t = |s: &str| extract_city(&tokenize(s), &cities());
        assert_eq!(t("weather in new york today").as_deref(), Some("New York"));
        assert_eq!(t("is it cold in york").as_deref(), Some("York"));
        assert_eq!(
            t("salt lake city forecast").as_deref(),
            Some("Salt Lake City")
        );
        assert_eq!(t("weather please"), None);
    }

    #[test]
    fn templated_answer_and_follow_up_question() {
        let fixture = FixtureWeather::parse("Boston\tSunny\t72\t75\t60\n", Path::new("w")).unwrap();
        let c = WeatherComponent::new(Box::new(fixture), cities());
        let mut s = session();
        let r = turn(
            &c,
            &mut s,
            IntentLabel::Weather,
            "what's the weather in Boston",
        );
        assert_eq!(
            r.text,
            "Right now in Boston it's sunny and 72°F, with a high of 75 and a low of 60."
        );
        let r = turn(&c, &mut s, IntentLabel::Weather, "what's the weather like");
        assert!(r.text.ends_with('?'));
        assert_eq!(r.sub_state.as_deref(), Some("awaiting_city"));
        let r = turn(&c, &mut s, IntentLabel::Weather, "York");
        assert!(r.text.contains("forecast for York"));
    }

    #[test]
    fn bad_rows_and_remote_errors() {
        assert!(FixtureWeather::parse("Boston\tSunny\thot\t1\t2\n", Path::new("w")).is_err());
        let url = serve_canned(vec![
            (
                200,
                r#"{"city":"Boston","condition":"Rain","temperature_f":50,"high_f":55,"low_f":45}"#
                    .into(),
            ),
            (500, "{}".into()),
        ]);
        let c = WeatherComponent::new(
            Box::new(RemoteWeather::new(url, Duration::from_secs(2))),
            cities(),
        );
        let mut s = session();
        assert!(turn(&c, &mut s, IntentLabel::Weather, "boston")
            .text
            .contains("rain and 50°F"));
        assert!(turn(&c, &mut s, IntentLabel::Weather, "boston")
            .error
            .is_some());
    }
}
