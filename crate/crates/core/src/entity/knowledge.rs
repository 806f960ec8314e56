use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::Gazetteer;
use crate::remote::HttpJson;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnowledgeSource {
    Gazetteer,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeHit {
    pub description: String,
    pub confidence: f64,
    pub source: KnowledgeSource,
}

/// Resolves an entity surface to a short type description.
pub trait KnowledgeClient: Send + Sync {
    fn lookup(&self, surface: &str) -> Result<Option<KnowledgeHit>>;
}

impl<T: KnowledgeClient + ?Sized> KnowledgeClient for Arc<T> {
    fn lookup(&self, surface: &str) -> Result<Option<KnowledgeHit>> {
        (**self).lookup(surface)
    }
}

#[derive(Debug, Deserialize)]
struct RemoteReply {
    description: String,
    #[serde(default = "one")]
    score: f64,
}

fn one() -> f64 {
    1.0
}

/// Queries `GET <endpoint>?query=<surface>` expecting
/// `{"description": "...", "score": 0.9}`. Any failure, an empty description
/// or a 404 falls back to the gazetteer.
#[derive(Debug, Clone)]
pub struct RemoteKnowledgeClient {
    http: HttpJson,
    fallback: Arc<Gazetteer>,
}

impl RemoteKnowledgeClient {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(2);

    pub fn new(endpoint: impl Into<String>, timeout: Duration, fallback: Arc<Gazetteer>) -> Self {
        Self {
            http: HttpJson::new(endpoint, timeout),
            fallback,
        }
    }
}

impl KnowledgeClient for RemoteKnowledgeClient {
    fn lookup(&self, surface: &str) -> Result<Option<KnowledgeHit>> {
        match self.http.get::<RemoteReply>(&[("query", surface)]) {
            Ok(Some(reply)) if !reply.description.trim().is_empty() => Ok(Some(KnowledgeHit {
                description: reply.description.trim().to_string(),
                confidence: reply.score,
                source: KnowledgeSource::External,
            })),
            Ok(_) => self.fallback.lookup(surface),
            Err(message) => {
                tracing::warn!(endpoint = self.http.endpoint(), %message, "knowledge lookup failed, using gazetteer");
                self.fallback.lookup(surface)
            }
        }
    }
}
