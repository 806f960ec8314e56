use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::error::{data_lines, read_to_string};
use crate::Result;

const TOLD_KEY: &str = "joke.told";

/// Tells jokes in a per-session shuffled order without repeating.
pub struct JokeComponent {
    jokes: Vec<String>,
}

impl JokeComponent {
    pub fn new(jokes: Vec<String>) -> Self {
        Self { jokes }
    }

    /// One joke per line.
    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::new(
            data_lines(&read_to_string(path)?)
                .map(|(_, l)| l.trim().to_string())
                .collect(),
        ))
    }

    pub fn order(&self, seed: u64) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.jokes.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        order
    }
}

impl Component for JokeComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Joke
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let told = request.cache(TOLD_KEY).and_then(Value::as_u64).unwrap_or(0) as usize;
        match self.order(request.session.seed).get(told) {
            Some(&i) => {
                ComponentResponse::say(self.jokes[i].clone()).with_cache(TOLD_KEY, json!(told + 1))
            }
            None => ComponentResponse::say(
                "I'm all out of jokes for now. You've heard every one I know!",
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::testing::{session, turn};
    use crate::intent::IntentLabel;
    use std::collections::HashSet;

    #[test]
    fn no_repeats_until_exhausted() {
        let c = JokeComponent::new((0..5).map(|i| format!("joke {i}")).collect());
        let mut s = session();
        let told: HashSet<String> = (0..5)
            .map(|_| turn(&c, &mut s, IntentLabel::Joke, "tell me a joke").text)
            .collect();
        assert_eq!(told.len(), 5);
        assert!(turn(&c, &mut s, IntentLabel::Joke, "another")
            .text
            .contains("all out"));
    }

    #[test]
    fn order_depends_on_seed_only() {
        let c = JokeComponent::new((0..20).map(|i| i.to_string()).collect());
        assert_eq!(c.order(7), c.order(7));
        assert_ne!(c.order(7), c.order(8));
    }
}
