//! The assembled agent: classification, routing, components, transitions
//! and logging behind one per-turn call.

mod config;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use config::{AgentConfig, DEFAULT_MASTER_SEED, REQUIRED_DATA_FILES};

use crate::components::{ComponentId, ComponentRequest, ComponentResponse, Components};
use crate::dialogue::{
    derive_seed, resolve_coreference, update_and_route, DialogueStateId, RoutingResult, Session,
    SessionId, Speaker, TopState,
};
use crate::entity::{
    EntityLinker, Gazetteer, IntentDecision, KnowledgeClient, ProfileSet, RemoteKnowledgeClient,
};
use crate::intent::{load_labeled_texts, ClassifierModel, LabeledDataset, TrainerSpec};
use crate::logger::{DialogueLog, SessionLog, SessionStart, SessionSummary, TurnRecord};
use crate::text::{tokenize, EmbeddingTable, FeatureModels, RuleSet, TermWeightModel};
use crate::transition::{
    compose_response, recommend_topic, suggestion_due, EntityTopicMap, RefusalOutcome, TopicId,
};
use crate::{Error, Result};

/// Feature extractors fit on the labeled utterances in `data_dir`.
pub fn build_feature_models(data_dir: &Path) -> Result<FeatureModels> {
    let texts = load_labeled_texts(&data_dir.join("intents.tsv"))?;
    let tokens: Vec<Vec<String>> = texts.iter().map(|t| tokenize(&t.text)).collect();
    Ok(FeatureModels {
        terms: TermWeightModel::fit(&tokens)?,
        embeddings: EmbeddingTable::load(&data_dir.join("embeddings.txt"))?,
        rules: RuleSet::load(&data_dir.join("rules.tsv"))?,
    })
}

/// Trains a general classifier on `intents.tsv`.
pub fn train_model(data_dir: &Path, spec: &TrainerSpec) -> Result<ClassifierModel> {
    let models = build_feature_models(data_dir)?;
    let texts = load_labeled_texts(&data_dir.join("intents.tsv"))?;
    spec.train(&LabeledDataset::featurize(&models, &texts)?)
}

/// What the agent said on one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub session_id: SessionId,
    pub turn_index: u32,
    pub text: String,
    pub state: DialogueStateId,
    pub component: ComponentId,
    pub suggestion: Option<TopicId>,
    pub latency_ms: f64,
    /// Component failure that was answered with a fallback.
    pub error: Option<String>,
    /// The turn was answered but could not be written to the log.
    pub log_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub turn_index: u32,
    pub user_text: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub session_id: SessionId,
    pub turns: usize,
    pub divergence: Option<Divergence>,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.divergence.is_none()
    }
}

const COMPONENT_FAILURE: &str = "Sorry, something went wrong on my side. Let's try something else.";

pub struct Agent {
    config: AgentConfig,
    features: FeatureModels,
    model: ClassifierModel,
    linker: EntityLinker,
    topics: EntityTopicMap,
    components: Components,
    log: Option<DialogueLog>,
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent")
            .field("config", &self.config)
            .field("model", &self.model.kind())
            .field("linker", &self.linker)
            .finish()
    }
}

impl Agent {
    /// Loads every fixture, the trained model and, when configured, the log.
    pub fn load(config: AgentConfig) -> Result<Self> {
        let model_path = config.model_path();
        if !model_path.exists() {
            return Err(Error::Config(format!(
                "model file {} not found; train one first",
                model_path.display()
            )));
        }
        let model = ClassifierModel::load(&model_path)?;
        Self::with_model(config, model)
    }

    /// Like [`Agent::load`] with an already trained model.
    pub fn with_model(mut config: AgentConfig, model: ClassifierModel) -> Result<Self> {
        config.router.reminder_threshold = config.transition.reminder_threshold;
        let dir = config.data_dir.clone();
        let features = build_feature_models(&dir)?;
        let width = features.layout().width();
        if model.width() != width {
            return Err(Error::Dimension {
                expected: width,
                found: model.width(),
            });
        }
        let gazetteer = Arc::new(Gazetteer::load(&dir.join("gazetteer.tsv"))?);
        let profiles = ProfileSet::load(&dir.join("profiles.tsv"))?;
        let linker = match &config.knowledge_endpoint {
            Some(url) => {
                let knowledge: Arc<dyn KnowledgeClient> = Arc::new(RemoteKnowledgeClient::new(
                    url.clone(),
                    Duration::from_millis(config.clients.timeout_ms),
                    gazetteer.clone(),
                ));
                EntityLinker::new(gazetteer, knowledge, profiles, config.linker)?
            }
            None => EntityLinker::offline(gazetteer, profiles, config.linker)?,
        };
        let topics = EntityTopicMap::load(&dir.join("entity_topics.tsv"))?;
        let components = Components::load(&dir, &config.clients)?;
        let log = config.log_dir.as_ref().map(DialogueLog::open).transpose()?;
        Ok(Self {
            config,
            features,
            model,
            linker,
            topics,
            components,
            log,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn model(&self) -> &ClassifierModel {
        &self.model
    }

    pub fn features(&self) -> &FeatureModels {
        &self.features
    }

    pub fn linker(&self) -> &EntityLinker {
        &self.linker
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn log(&self) -> Option<&DialogueLog> {
        self.log.as_ref()
    }

    pub fn classify(&self, text: &str) -> Result<IntentDecision> {
        self.linker
            .hierarchical_classify(&self.model, &self.features, text)
    }

    /// Opens a session, logging its start when a log is configured.
    pub fn create_session(&self, id: Option<SessionId>, now_ms: i64) -> Result<Session> {
        let id = id.unwrap_or_else(SessionId::random);
        let seed = derive_seed(self.config.master_seed, &id);
        if let Some(log) = &self.log {
            log.start_session(SessionStart {
                schema: crate::logger::LOG_SCHEMA_VERSION,
                session_id: id.clone(),
                seed,
                started_ms: now_ms,
            })?;
        }
        Ok(Session::new(id, seed, self.config.stack_bound, now_ms))
    }

    /// Runs one user turn through the full pipeline.
    pub fn process_utterance(
        &self,
        session: &mut Session,
        text: &str,
        now_ms: i64,
    ) -> Result<AgentResponse> {
        self.run_turn(session, text, now_ms, self.log.as_ref())
    }

    fn run_turn(
        &self,
        session: &mut Session,
        text: &str,
        now_ms: i64,
        log: Option<&DialogueLog>,
    ) -> Result<AgentResponse> {
        let started = Instant::now();
        if session.finalized {
            return Err(Error::Conflict(format!(
                "session {} is finalized",
                session.id
            )));
        }
        if text.trim().is_empty() {
            return Err(Error::Input("utterance is empty".into()));
        }
        let turn_index = session.turn_count + 1;
        let state_before = session.state.clone();

        let decision = self.classify(text)?;
        let resolved = resolve_coreference(session, text);
        if let Some(entity) = &decision.entity {
            session.remember_entity(entity);
        }
        let route = update_and_route(session, &decision, &resolved, &self.config.router);
        let response = self.respond(session, &decision, &route);
        self.apply(session, &route, &response);

        let suggestion = if self.wants_suggestion(session, &route, &response, turn_index) {
            let s = recommend_topic(session, decision.entity.as_ref(), &self.topics);
            if let Some(s) = &s {
                session.pending_suggestion = Some(s.clone());
                session.last_suggestion_turn = Some(turn_index);
                session.enter(DialogueStateId::new(TopState::Suggestion));
            }
            s
        } else {
            None
        };
        let reply = compose_response(
            &response.text,
            suggestion.as_ref(),
            self.config.transition.response_cap,
        );

        session.turn_count = turn_index;
        session.last_active_ms = now_ms;
        session.push_context(Speaker::User, text);
        session.push_context(Speaker::System, reply.clone());
        let latency_ms = started.elapsed().as_secs_f64() * 1000.0;

        let mut out = AgentResponse {
            session_id: session.id.clone(),
            turn_index,
            text: reply,
            state: session.state.clone(),
            component: route.component,
            suggestion: suggestion.map(|s| s.topic),
            latency_ms,
            error: response.error.or(decision.knowledge_error.clone()),
            log_error: None,
        };
        if let Some(log) = log {
            let record = TurnRecord {
                schema: crate::logger::LOG_SCHEMA_VERSION,
                session_id: session.id.clone(),
                turn_index,
                timestamp_ms: now_ms,
                user_text: text.to_string(),
                resolved_text: resolved,
                decision: (&decision).into(),
                state_before,
                state_after: out.state.clone(),
                component: out.component,
                route_reason: route.reason,
                response_text: out.text.clone(),
                suggestion: out.suggestion,
                latency_ms,
                error: out.error.clone(),
            };
            if let Err(e) = log.append_turn(&record) {
                tracing::error!(session = %session.id, error = %e, "turn not logged");
                out.log_error = Some(e.to_string());
            }
        }
        Ok(out)
    }

    fn respond(
        &self,
        session: &Session,
        decision: &IntentDecision,
        route: &RoutingResult,
    ) -> ComponentResponse {
        let tokens = tokenize(&route.resolved_text);
        let request = ComponentRequest {
            resolved_text: &route.resolved_text,
            tokens: &tokens,
            session,
            decision,
            route,
        };
        let component = self.components.get(route.component);
        catch_unwind(AssertUnwindSafe(|| component.respond(&request))).unwrap_or_else(|_| {
            tracing::error!(component = %route.component, "component panicked");
            ComponentResponse::say(COMPONENT_FAILURE)
                .with_error(format!("{} component panicked", route.component))
        })
    }

    fn apply(&self, session: &mut Session, route: &RoutingResult, response: &ComponentResponse) {
        for (key, value) in &response.cache_updates {
            if value.is_null() {
                session.remove_cache(key);
            } else {
                session.set_cache(key.clone(), value.clone());
            }
        }
        if session.state.top.component() == Some(route.component) {
            session.state.sub = response.sub_state.clone();
        }
        session.pending_offer = response.followup_offer.clone();
        if let Some(topic) = response.served_topic {
            session.discussed_topics.insert(topic);
        }
    }

    fn wants_suggestion(
        &self,
        session: &Session,
        route: &RoutingResult,
        response: &ComponentResponse,
        turn_index: u32,
    ) -> bool {
        if response.followup_offer.is_some() || response.sub_state.is_some() {
            return false;
        }
        let continued = route.refusal == Some(RefusalOutcome::Continue);
        match route.component {
            ComponentId::Unrecognized => false,
            ComponentId::Transition if !continued => false,
            _ => {
                continued
                    || suggestion_due(session, turn_index, self.config.transition.suggestion_gap)
            }
        }
    }

    /// Closes the session and records its rating.
    pub fn finalize(
        &self,
        session: &mut Session,
        rating: Option<u8>,
        feedback: Option<String>,
        now_ms: i64,
    ) -> Result<Option<SessionSummary>> {
        if let Some(r) = rating.filter(|r| !(1..=5).contains(r)) {
            return Err(Error::Input(format!(
                "rating must be between 1 and 5, got {r}"
            )));
        }
        if session.finalized && (session.rating != rating) {
            return Err(Error::Conflict(format!(
                "session {} was already finalized",
                session.id
            )));
        }
        let summary = match &self.log {
            Some(log) => Some(log.finalize_session(&session.id, rating, feedback, now_ms)?),
            None => None,
        };
        session.finalized = true;
        session.rating = rating;
        session.last_active_ms = now_ms;
        Ok(summary)
    }

    /// Replays a logged session from its recorded seed without logging and
    /// reports the first turn whose response differs.
    pub fn replay(&self, log: &SessionLog) -> Result<ReplayReport> {
        let start = log
            .start
            .as_ref()
            .ok_or_else(|| Error::Input(format!("session {} has no start record", log.id)))?;
        let mut session = Session::new(
            log.id.clone(),
            start.seed,
            self.config.stack_bound,
            start.started_ms,
        );
        let mut report = ReplayReport {
            session_id: log.id.clone(),
            turns: log.turns.len(),
            divergence: None,
        };
        for turn in &log.turns {
            let actual = self
                .run_turn(&mut session, &turn.user_text, turn.timestamp_ms, None)?
                .text;
            if actual != turn.response_text {
                report.divergence = Some(Divergence {
                    turn_index: turn.turn_index,
                    user_text: turn.user_text.clone(),
                    expected: turn.response_text.clone(),
                    actual,
                });
                break;
            }
        }
        Ok(report)
    }
}
