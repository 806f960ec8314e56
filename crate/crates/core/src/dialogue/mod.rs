//! Per-conversation state: the state machine, its stack, session variables
//! and routing of classified utterances to components.

mod routing;
mod session;
mod state;

pub use routing::{update_and_route, RouteReason, RouterConfig, RoutingResult};
pub use session::{
    derive_seed, resolve_coreference, ContextEntry, Session, SessionId, Speaker, ENTITY_CACHE_KEY,
};
pub use state::{DialogueStateId, StateStack, TopState, DEFAULT_STACK_BOUND};
