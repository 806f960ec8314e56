use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::components::ClientSettings;
use crate::dialogue::{RouterConfig, DEFAULT_STACK_BOUND};
use crate::entity::LinkerConfig;
use crate::error::read_to_string;
use crate::transition::TransitionConfig;
use crate::{Error, Result};

pub const DEFAULT_MASTER_SEED: u64 = 2017;

/// Fixture files every agent needs under `data_dir`.
pub const REQUIRED_DATA_FILES: [&str; 15] = [
    "intents.tsv",
    "embeddings.txt",
    "rules.tsv",
    "gazetteer.tsv",
    "profiles.tsv",
    "entity_topics.tsv",
    "smalltalk.tsv",
    "wiki.tsv",
    "weather.tsv",
    "cities.txt",
    "jokes.txt",
    "qa.tsv",
    "movies.tsv",
    "music.tsv",
    "recipes.tsv",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub data_dir: PathBuf,
    /// Defaults to `model.json` inside `data_dir`.
    pub model_path: Option<PathBuf>,
    /// Turn logging is off when unset.
    pub log_dir: Option<PathBuf>,
    pub master_seed: u64,
    pub stack_bound: usize,
    pub knowledge_endpoint: Option<String>,
    pub linker: LinkerConfig,
    pub router: RouterConfig,
    pub transition: TransitionConfig,
    pub clients: ClientSettings,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            model_path: None,
            log_dir: None,
            master_seed: DEFAULT_MASTER_SEED,
            stack_bound: DEFAULT_STACK_BOUND,
            knowledge_endpoint: None,
            linker: LinkerConfig::default(),
            router: RouterConfig::default(),
            transition: TransitionConfig::default(),
            clients: ClientSettings::default(),
        }
    }
}

fn parse_env<T: FromStr>(name: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{name}: cannot parse '{raw}'")))
}

fn optional(raw: String) -> Option<String> {
    let raw = raw.trim().to_string();
    (!raw.is_empty()).then_some(raw)
}

impl AgentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model_path
            .clone()
            .unwrap_or_else(|| self.data_dir.join("model.json"))
    }

    /// Applies `ERICSON_*` overrides read through `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        let get = |name: &str| lookup(name).map(|v| (name.to_string(), v));
        if let Some((_, v)) = get("ERICSON_DATA_DIR") {
            self.data_dir = PathBuf::from(v);
        }
        if let Some((_, v)) = get("ERICSON_MODEL_PATH") {
            self.model_path = optional(v).map(PathBuf::from);
        }
        if let Some((_, v)) = get("ERICSON_LOG_DIR") {
            self.log_dir = optional(v).map(PathBuf::from);
        }
        if let Some((n, v)) = get("ERICSON_MASTER_SEED") {
            self.master_seed = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_STACK_BOUND") {
            self.stack_bound = parse_env(&n, &v)?;
        }
        if let Some((_, v)) = get("ERICSON_KNOWLEDGE_ENDPOINT") {
            self.knowledge_endpoint = optional(v);
        }
        if let Some((n, v)) = get("ERICSON_SIMILARITY_THRESHOLD") {
            self.linker.similarity_threshold = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_OVERRIDE_CONFIDENCE") {
            self.linker.override_confidence = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_SWITCH_CONFIDENCE") {
            self.router.switch_confidence = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_REMINDER_THRESHOLD") {
            self.transition.reminder_threshold = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_SUGGESTION_GAP") {
            self.transition.suggestion_gap = parse_env(&n, &v)?;
        }
        if let Some((n, v)) = get("ERICSON_RESPONSE_CAP") {
            self.transition.response_cap = parse_env(&n, &v)?;
        }
        if let Some((_, v)) = get("ERICSON_WIKI_ENDPOINT") {
            self.clients.wiki_endpoint = optional(v);
        }
        if let Some((_, v)) = get("ERICSON_WEATHER_ENDPOINT") {
            self.clients.weather_endpoint = optional(v);
        }
        if let Some((n, v)) = get("ERICSON_CLIENT_TIMEOUT_MS") {
            self.clients.timeout_ms = parse_env(&n, &v)?;
        }
        Ok(())
    }

    /// Optional TOML file, then the process environment, then validation.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut config = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        config.validate()?;
        Ok(config)
    }

    /// Checks ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be within [0, 1], got {v}"
                )))
            }
        };
        unit(
            "linker.similarity_threshold",
            self.linker.similarity_threshold,
        )?;
        unit(
            "linker.override_confidence",
            self.linker.override_confidence,
        )?;
        unit("router.switch_confidence", self.router.switch_confidence)?;
        if self.transition.reminder_threshold == 0 {
            return Err(Error::Config(
                "transition.reminder_threshold must be at least 1".into(),
            ));
        }
        if self.transition.response_cap < 80 {
            return Err(Error::Config(
                "transition.response_cap must be at least 80".into(),
            ));
        }
        if self.stack_bound == 0 {
            return Err(Error::Config("stack_bound must be at least 1".into()));
        }
        if self.clients.timeout_ms == 0 {
            return Err(Error::Config("clients.timeout_ms must be positive".into()));
        }
        let mut missing: Vec<PathBuf> = REQUIRED_DATA_FILES
            .iter()
            .map(|f| self.data_dir.join(f))
            .chain([self.data_dir.join("feeds"), self.model_path()])
            .filter(|p| !p.exists())
            .collect();
        missing.dedup();
        if !missing.is_empty() {
            let names: Vec<String> = missing.iter().map(|p| p.display().to_string()).collect();
            return Err(Error::Config(format!(
                "missing files: {}",
                names.join(", ")
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn partial_toml_keeps_defaults() {
        let c = AgentConfig::from_toml_str(
            "master_seed = 7\n[linker]\nsimilarity_threshold = 0.4\n[clients]\nwiki_endpoint = \"http://w\"\n",
        )
        .unwrap();
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.linker.similarity_threshold, 0.4);
        assert_eq!(c.linker.override_confidence, 0.5);
        assert_eq!(c.clients.wiki_endpoint.as_deref(), Some("http://w"));
        assert_eq!(c.transition, TransitionConfig::default());
        assert!(AgentConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn environment_overrides() {
        let env: HashMap<&str, &str> = [
            ("ERICSON_MASTER_SEED", "99"),
            ("ERICSON_SUGGESTION_GAP", "3"),
            ("ERICSON_LOG_DIR", "/tmp/x"),
            ("ERICSON_WEATHER_ENDPOINT", ""),
        ]
        .into();
        let mut c = AgentConfig {
            clients: ClientSettings {
                weather_endpoint: Some("http://old".into()),
                ..ClientSettings::default()
            },
            ..AgentConfig::default()
        };
        c.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(c.master_seed, 99);
        assert_eq!(c.transition.suggestion_gap, 3);
        assert_eq!(c.log_dir, Some(PathBuf::from("/tmp/x")));
        assert_eq!(c.clients.weather_endpoint, None);
        let err = c.apply_env(|k| (k == "ERICSON_STACK_BOUND").then(|| "many".to_string()));
        assert!(matches!(err, Err(Error::Config(m)) if m.contains("ERICSON_STACK_BOUND")));
    }

    #[test]
    fn validation_names_missing_files_and_bad_ranges() {
        let c = AgentConfig {
            data_dir: PathBuf::from("/nonexistent"),
            ..AgentConfig::default()
        };
        assert!(
            matches!(c.validate(), Err(Error::Config(m)) if m.contains("/nonexistent/model.json"))
        );
        let mut c = AgentConfig::default();
        c.router.switch_confidence = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("switch_confidence")));
    }
}
