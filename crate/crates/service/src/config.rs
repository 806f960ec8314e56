use std::path::{Path, PathBuf};

use ericson_core::agent::AgentConfig;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    /// Sessions idle this long are finalized without a rating.
    pub idle_timeout_secs: u64,
    /// Allow any origin, for the browser chat client.
    pub cors: bool,
    pub agent: AgentConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            idle_timeout_secs: 1800,
            cors: false,
            agent: AgentConfig {
                log_dir: Some(PathBuf::from("logs")),
                ..AgentConfig::default()
            },
        }
    }
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ServiceError> {
        toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    /// Optional TOML file, then `ERICSON_*` variables, then validation.
    pub fn load(path: Option<&Path>) -> Result<Self, ServiceError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ServiceError::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml_str(&text)?
            }
            None => Self::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply_env(
        &mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<(), ServiceError> {
        if let Some(v) = lookup("ERICSON_BIND") {
            self.bind = v;
        }
        if let Some(v) = lookup("ERICSON_IDLE_TIMEOUT_SECS") {
            self.idle_timeout_secs = v.trim().parse().map_err(|_| {
                ServiceError::Config(format!("ERICSON_IDLE_TIMEOUT_SECS: cannot parse '{v}'"))
            })?;
        }
        if let Some(v) = lookup("ERICSON_CORS") {
            self.cors = matches!(v.trim().to_ascii_lowercase().as_str(), "1" | "true" | "yes");
        }
        self.agent.apply_env(lookup)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        self.bind
            .parse::<std::net::SocketAddr>()
            .map_err(|e| ServiceError::Config(format!("bind '{}': {e}", self.bind)))?;
        if self.idle_timeout_secs == 0 {
            return Err(ServiceError::Config(
                "idle_timeout_secs must be positive".into(),
            ));
        }
        if self.agent.log_dir.is_none() {
            return Err(ServiceError::Config(
                "the service needs agent.log_dir".into(),
            ));
        }
        self.agent.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_agent_table() {
        let c = ServiceConfig::from_toml_str(
            "bind = \"0.0.0.0:9000\"\ncors = true\n[agent]\nmaster_seed = 5\n[agent.transition]\nsuggestion_gap = 4\n",
        )
        .unwrap();
        assert_eq!(c.bind, "0.0.0.0:9000");
        assert!(c.cors);
        assert_eq!(c.idle_timeout_secs, 1800);
        assert_eq!(c.agent.master_seed, 5);
        assert_eq!(c.agent.transition.suggestion_gap, 4);
    }

    #[test]
    fn env_and_validation() {
        let mut c = ServiceConfig::default();
        c.apply_env(|k| match k {
            "ERICSON_CORS" => Some("true".into()),
            "ERICSON_BIND" => Some("nonsense".into()),
            "ERICSON_MASTER_SEED" => Some("3".into()),
            _ => None,
        })
        .unwrap();
        assert!(c.cors);
        assert_eq!(c.agent.master_seed, 3);
        assert!(matches!(c.validate(), Err(ServiceError::Config(m)) if m.contains("nonsense")));
        assert!(c
            .apply_env(|k| (k == "ERICSON_IDLE_TIMEOUT_SECS").then(|| "soon".into()))
            .is_err());
    }
}
