pub mod agent;
pub mod analytics;
pub mod components;
pub mod dialogue;
pub mod entity;
mod error;
pub mod intent;
pub mod logger;
mod remote;
pub mod text;
pub mod transition;

pub use error::{Error, Result};
