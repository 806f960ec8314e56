use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    join_with, sentence, string_list, Component, ComponentId, ComponentRequest, ComponentResponse,
};
use crate::error::{data_lines, read_to_string};
use crate::text::tokenize;
use crate::{Error, Result};

const RECIPE_KEY: &str = "food.recipe";
const REMAINING_KEY: &str = "food.remaining_parts";
const AWAITING_PART: &str = "awaiting_part";
const AWAITING_RECIPE: &str = "awaiting_recipe";

/// Recipe parts in the order they are offered.
pub const PARTS: [&str; 3] = ["ingredients", "directions", "nutrition"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub title: String,
    pub ingredients: String,
    pub directions: String,
    pub nutrition: String,
}

impl Recipe {
    pub fn part(&self, name: &str) -> Option<&str> {
        match name {
            "ingredients" => Some(&self.ingredients),
            "directions" => Some(&self.directions),
            "nutrition" => Some(&self.nutrition),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RecipeBook {
    recipes: Vec<Recipe>,
}

impl RecipeBook {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// `title<TAB>ingredients=...;directions=...;nutrition=...` per line.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut recipes = Vec::new();
        for (line, content) in data_lines(text) {
            let err = |m: &str| Error::parse(origin, line, m);
            let (title, rest) = content
                .split_once('\t')
                .ok_or_else(|| err("expected title<TAB>parts"))?;
            let mut parts = [None, None, None];
            for pair in rest.split(';').filter(|p| !p.trim().is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| err("part without '='"))?;
                let slot = PARTS
                    .iter()
                    .position(|p| *p == k.trim())
                    .ok_or_else(|| err("unknown recipe part"))?;
                parts[slot] = Some(v.trim().to_string());
            }
            let [Some(ingredients), Some(directions), Some(nutrition)] = parts else {
                return Err(err("recipe needs ingredients, directions and nutrition"));
            };
            recipes.push(Recipe {
                title: title.trim().to_string(),
                ingredients,
                directions,
                nutrition,
            });
        }
        Ok(Self { recipes })
    }

    pub fn recipes(&self) -> &[Recipe] {
        &self.recipes
    }

    pub fn get(&self, title: &str) -> Option<&Recipe> {
        let wanted = tokenize(title);
        self.recipes.iter().find(|r| tokenize(&r.title) == wanted)
    }

    /// Longest recipe title in `tokens`.
    pub fn find_in(&self, tokens: &[String]) -> Option<&Recipe> {
        self.recipes
            .iter()
            .map(|r| (r, tokenize(&r.title)))
            .filter(|(_, w)| !w.is_empty() && tokens.windows(w.len()).any(|win| win == &w[..]))
            .max_by_key(|(_, w)| w.len())
            .map(|(r, _)| r)
    }
}

fn parts_in(tokens: &[String]) -> Vec<&'static str> {
    PARTS
        .into_iter()
        .filter(|p| {
            let keys: &[&str] = match *p {
                "ingredients" => &["ingredients", "ingredient", "need"],
                "directions" => &["directions", "steps", "instructions", "make", "cook"],
                _ => &["nutrition", "calories", "healthy", "nutritional"],
            };
            tokens.iter().any(|t| keys.contains(&t.as_str()))
        })
        .collect()
}

pub struct FoodComponent {
    book: RecipeBook,
}

impl FoodComponent {
    pub fn new(book: RecipeBook) -> Self {
        Self { book }
    }

    fn menu(body: &str, recipe: &Recipe, remaining: &[&str]) -> ComponentResponse {
        let prompt = format!(
            "I can tell you the {}. Which would you like?",
            join_with(remaining, "or")
        );
        ComponentResponse::offer(body, &prompt, ComponentId::Food, AWAITING_PART)
            .with_cache(RECIPE_KEY, json!(recipe.title))
            .with_cache(REMAINING_KEY, json!(remaining))
    }

    fn choose(&self, request: &ComponentRequest<'_>, recipe: &Recipe) -> ComponentResponse {
        let stored = string_list(request.cache(REMAINING_KEY));
        let mut remaining: Vec<&str> = PARTS
            .into_iter()
            .filter(|p| stored.iter().any(|s| s == p))
            .collect();
        let asked = parts_in(request.tokens);
        if asked.is_empty() {
            if request.is_negative() {
                return ComponentResponse::say("Okay, enjoy your cooking!")
                    .with_cache(RECIPE_KEY, Value::Null);
            }
            return Self::menu("Sorry, which part?", recipe, &remaining);
        }
        let body: Vec<String> = asked
            .iter()
            .map(|p| {
                format!(
                    "{}: {}",
                    capitalize(p),
                    sentence(recipe.part(p).unwrap_or_default())
                )
            })
            .collect();
        remaining.retain(|p| !asked.contains(p));
        if remaining.is_empty() {
            ComponentResponse::say(format!(
                "{} That's the whole recipe. Enjoy!",
                body.join(" ")
            ))
            .with_cache(RECIPE_KEY, Value::Null)
        } else {
            Self::menu(&body.join(" "), recipe, &remaining)
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

impl Component for FoodComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Food
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        let named = self
            .book
            .find_in(request.tokens)
            .or_else(|| request.entity().and_then(|e| self.book.get(e)));
        let current = request
            .cache(RECIPE_KEY)
            .and_then(Value::as_str)
            .and_then(|t| self.book.get(t));
        match (request.sub_state(), named, current) {
            (Some(AWAITING_PART), None, Some(recipe)) => self.choose(request, recipe),
            (Some(AWAITING_PART), Some(r), Some(cur)) if r.title == cur.title => {
                self.choose(request, r)
            }
            (_, Some(recipe), _) => Self::menu(
                &format!("I have a recipe for {}.", recipe.title),
                recipe,
                &PARTS,
            ),
            _ => {
                let titles: Vec<&str> = self
                    .book
                    .recipes()
                    .iter()
                    .map(|r| r.title.as_str())
                    .collect();
                let mut r = ComponentResponse::say(format!(
                    "I don't have a recipe for that, but I know how to make {}. Which one sounds good?",
                    join_with(&titles, "or")
                ));
                r.sub_state = Some(AWAITING_RECIPE.into());
                r
            }
        }
    }
}
