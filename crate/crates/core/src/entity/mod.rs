//! Second-level intent classification from named entities.

mod classify;
mod eval;
mod gazetteer;
mod knowledge;

pub use classify::{
    classify_entity, EntityClass, EntityLinker, EntityMatch, IntentDecision, LinkerConfig,
    ProfileSet, TopicProfile,
};
pub use eval::{evaluate_hierarchical, HierarchicalReport};
pub use gazetteer::{EntityMention, Gazetteer, GazetteerEntry};
pub use knowledge::{KnowledgeClient, KnowledgeHit, KnowledgeSource, RemoteKnowledgeClient};
