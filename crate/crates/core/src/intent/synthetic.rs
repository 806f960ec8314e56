//! Seeded generator for labeled utterances and a matching word-embedding
//! table built from semantic word clusters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IntentLabel, LabeledText};
use crate::text::{tokenize, EmbeddingTable};
use crate::Result;

pub const DEFAULT_CORPUS_SEED: u64 = 2017;
pub const DEFAULT_PER_CLASS: usize = 150;
pub const DEFAULT_EMBEDDING_DIM: usize = 50;

fn templates(label: IntentLabel) -> &'static [&'static str] {
    use IntentLabel::*;
    match label {
        Positive => &[
            "yes",
            "yes please",
            "sure",
            "sure, tell me about that",
            "okay",
            "ok sure",
            "yeah",
            "yeah sure",
            "of course",
            "absolutely",
            "sounds good",
            "that sounds great",
            "i would love that",
            "go ahead",
            "why not",
            "yes i would",
            "definitely",
            "yep",
            "great",
            "please do",
            "yes tell me more",
            "i'd like that",
            "that would be nice",
            "sure thing",
            "alright",
            "yes, go on",
            "i'm good",
            "pretty good",
            "i'm doing great",
            "i'm fine thanks",
            "awesome",
            "that's cool",
            "love it",
            "yes that sounds fun",
            "sure, why not",
            "okay tell me",
            "yes i'd love to hear it",
            "very well thank you",
        ],
        Negative => &[
            "no",
            "no thanks",
            "nope",
            "not really",
            "none of them",
            "no thank you",
            "i don't want that",
            "not interested",
            "never mind",
            "nah",
            "i'm not interested",
            "none",
            "not now",
            "i'd rather not",
            "no way",
            "stop",
            "that's boring",
            "i hate that",
            "please don't",
            "no i don't",
            "not at all",
            "neither",
            "i'm not doing well",
            "i feel terrible",
            "i had a bad day",
            "not good",
            "i'm sad",
            "awful",
            "no, not that",
            "none of those",
            "nothing",
            "i don't care",
            "that's terrible",
            "no, skip it",
            "not today",
        ],
        SmallTalk => &[
            "hello",
            "hi",
            "hi there",
            "hey",
            "hey there",
            "good morning",
            "good evening",
            "how are you",
            "how are you doing",
            "how are you today",
            "what's your name",
            "who are you",
            "where do you live",
            "how old are you",
            "nice to meet you",
            "what can you do",
            "do you like {thing}",
            "are you a robot",
            "thank you",
            "thanks a lot",
            "bye",
            "goodbye",
            "see you later",
            "my name is {name}",
            "what's up",
            "are you human",
            "tell me about yourself",
            "what are you doing",
            "hello {name_bot}",
            "hi {name_bot}",
            "do you have a family",
            "what is your favorite color",
            "can we be friends",
            "you are nice",
            "i like you",
            "good night",
        ],
        News => &[
            "what's the latest news",
            "tell me the news",
            "any news about {news_topic}",
            "what is the news about {news_topic}",
            "give me the headlines",
            "latest {news_topic} news",
            "i love {news_topic} news",
            "what's happening in {news_topic}",
            "read me the headlines about {news_topic}",
            "any updates on {news_topic}",
            "breaking news",
            "another one",
            "give me another headline",
            "next headline please",
            "news please",
            "what are today's top stories",
            "tell me something about {news_topic} news",
            "i want to hear the news",
            "what's new in {news_topic}",
            "any {news_topic} headlines today",
            "what did the president say today",
            "news about {news_topic} please",
            "what's going on in the world",
        ],
        Wiki => &[
            "who is {person}",
            "who was {person}",
            "tell me about {thing}",
            "what is {thing}",
            "what is a {thing}",
            "search wikipedia for {thing}",
            "look up {thing}",
            "what do you know about {thing}",
            "give me information about {thing}",
            "who invented the {thing}",
            "define {thing}",
            "wikipedia {person}",
            "who is {person} anyway",
            "tell me who {person} is",
            "what is the history of {thing}",
            "information on {person}",
            "explain what {thing} is",
            "who's {person}",
            "look up {person} on wikipedia",
            "facts about {thing}",
        ],
        Weather => &[
            "what's the weather in {city}",
            "what is the weather like in {city}",
            "is it going to rain in {city}",
            "temperature in {city}",
            "how hot is it in {city}",
            "weather forecast for {city}",
            "will it snow in {city} today",
            "how's the weather",
            "is it cold outside in {city}",
            "do i need an umbrella in {city}",
            "what's the temperature today",
            "weather please",
            "is it sunny in {city}",
            "how windy is it in {city}",
            "tell me the forecast",
            "what's the weather tomorrow",
            "weather in {city}",
            "is it raining",
        ],
        Joke => &[
            "tell me a joke",
            "make me laugh",
            "say something funny",
            "i want to hear a joke",
            "do you know any jokes",
            "another joke",
            "tell me a funny story",
            "cheer me up",
            "know any good {joke_topic} jokes",
            "give me a joke about {joke_topic}",
            "tell me another joke",
            "joke please",
            "i need a laugh",
            "be funny",
            "got any jokes",
            "tell me a {joke_topic} joke",
            "something funny please",
            "can you tell jokes",
        ],
        LiveQa => &[
            "how do i {task}",
            "how can i {task}",
            "how to {task}",
            "why is the sky blue",
            "what is the best way to {task}",
            "can you help me {task}",
            "what should i do if {problem}",
            "is it safe to {task}",
            "why do cats purr",
            "why does {problem}",
            "what's the fastest way to {task}",
            "any tips to {task}",
            "how long does it take to {task}",
            "how many hours should i sleep",
            "what should i do when {problem}",
            "why do we dream",
            "how does the moon cause tides",
            "how much water should i drink",
        ],
        Movies => &[
            "let's talk about movies",
            "recommend a movie",
            "what movies are playing",
            "tell me about the {field}",
            "{field} information",
            "what's the {field} of {movie}",
            "who directed {movie}",
            "who stars in {movie}",
            "i want to watch a {genre} movie",
            "what are the new {genre} movies",
            "movie recommendations",
            "what is {movie} rated",
            "tell me about the movie {movie}",
            "any good films lately",
            "what's the plot of {movie}",
            "the {field} please",
            "i want the {field}",
            "{field}",
            "what's the {field}",
            "show me recent {genre} films",
            "what's playing in theaters",
            "tell me the {field} of the film",
            "i love {genre} movies",
            "movies please",
            "the {field} of the movie",
        ],
        Music => &[
            "play some {music_genre} music",
            "tell me some recent {music_genre} music",
            "no thanks, tell me about nice recent {music_genre} songs",
            "what are the top songs",
            "show me the top charts",
            "who sings {song}",
            "tell me about {singer}'s new album",
            "i love {music_genre} songs",
            "what's the number one song right now",
            "recommend some {music_genre} songs",
            "any new music from {singer}",
            "let's talk about music",
            "latest music news",
            "no, i'd rather hear some {music_genre} songs",
            "tell me about recent {music_genre} songs",
            "top {music_genre} albums",
            "what's trending in music",
            "music charts please",
            "new {music_genre} tracks",
            "no thanks, tell me some recent {music_genre} music instead",
            "nice recent {music_genre} songs",
            "who has the top album this week",
        ],
        Opinion => &[
            "what do you think of {opinion_topic}",
            "what is your opinion on {opinion_topic}",
            "do you support {opinion_topic}",
            "are you for or against {opinion_topic}",
            "what's your view on {opinion_topic}",
            "who will win the election",
            "is {opinion_topic} good or bad",
            "how do you feel about {opinion_topic}",
            "which religion is right",
            "are you republican or democrat",
            "what do you think about {opinion_topic}",
            "give me your opinion on {opinion_topic}",
            "do you agree with {opinion_topic}",
            "what's your stance on {opinion_topic}",
            "who did you vote for",
            "is {opinion_topic} wrong",
        ],
        Food => &[
            "how to cook {dish}",
            "give me a recipe for {dish}",
            "how do you make {dish}",
            "what are the ingredients for {dish}",
            "i'm hungry",
            "what should i cook for dinner",
            "{food_field} please",
            "tell me the {food_field}",
            "nutrition facts for {dish}",
            "recipe for {dish}",
            "let's talk about food",
            "what can i bake",
            "show me the {food_field}",
            "how do i cook {dish}",
            "what's in {dish}",
            "i want to make {dish}",
            "the {food_field} for the recipe",
            "cooking ideas for dinner",
            "how many calories in {dish}",
            "easy {dish} recipe",
        ],
        Transition => &[
            "let's talk about something else",
            "change the topic",
            "i want to talk about {topic}",
            "let's talk about {topic}",
            "can we talk about {topic}",
            "i'm doing great. let's talk about {topic}",
            "tell me something interesting",
            "what else can you talk about",
            "what topics do you have",
            "surprise me",
            "i'm bored",
            "let's chat about {topic}",
            "what should we talk about",
            "i don't know what to talk about",
            "let's talk about {name}",
            "let's discuss {topic}",
            "i want to talk about {name}",
            "talk about {topic}",
            "i'm good. let's talk about {name}",
            "can we talk about {name}",
            "new topic please",
            "let's switch topics",
        ],
        Unrecognized => &[
            "{mumble}",
            "{mumble} {mumble}",
            "{mumble} {mumble} {mumble}",
            "the {mumble} of",
            "uh {mumble}",
            "what the {mumble} uh",
            "i {mumble} you know the",
            "and and {mumble}",
            "so like {mumble} {mumble}",
        ],
    }
}

fn slot(name: &str) -> &'static [&'static str] {
    match name {
        "thing" => &[
            "pizza",
            "dogs",
            "the rain",
            "football",
            "books",
            "video games",
            "the ocean",
            "the moon",
            "photosynthesis",
            "democracy",
            "the internet",
            "volcanoes",
            "jazz",
            "the telephone",
            "gravity",
            "the eiffel tower",
            "black holes",
            "the roman empire",
            "chess",
            "electricity",
            "the pyramids",
            "dinosaurs",
            "the light bulb",
            "bitcoin",
        ],
        "name" => &[
            "alex",
            "sam",
            "maria",
            "john smith",
            "the weekend",
            "my dog",
            "tennis",
            "robert",
            "emma",
            "linda",
            "my garden",
            "priya",
            "carlos",
            "the beach",
            "old cars",
            "sophie",
        ],
        "name_bot" => &["ericson", "bot", "robot", "friend"],
        "news_topic" => &[
            "politics",
            "sports",
            "technology",
            "science",
            "space",
            "health",
            "business",
            "celebrity",
            "world",
            "economy",
            "basketball",
            "soccer",
            "travel",
            "hockey",
            "baseball",
            "animals",
            "local",
            "the election",
            "football",
        ],
        "person" => &[
            "albert einstein",
            "marie curie",
            "abraham lincoln",
            "ada lovelace",
            "nikola tesla",
            "isaac newton",
            "jane austen",
            "the queen of england",
            "charles darwin",
            "amelia earhart",
            "galileo",
            "mark twain",
            "the pope",
            "frida kahlo",
            "neil armstrong",
            "martin luther king",
        ],
        "city" => &[
            "boston", "seattle", "chicago", "new york", "london", "paris", "tokyo", "denver",
            "miami", "austin", "toronto", "sydney", "berlin", "atlanta",
        ],
        "joke_topic" => &[
            "animal",
            "knock knock",
            "science",
            "dad",
            "food",
            "computer",
            "school",
        ],
        "task" => &[
            "fix a flat tire",
            "learn to swim",
            "lose weight",
            "tie a tie",
            "plant tomatoes",
            "clean a laptop screen",
            "save money",
            "write a resume",
            "fall asleep faster",
            "remove a stain",
            "train a puppy",
            "change a light bulb",
            "learn spanish",
            "get rid of hiccups",
            "unclog a drain",
            "start running",
        ],
        "problem" => &[
            "my phone won't charge",
            "my car won't start",
            "i can't sleep",
            "my plant is dying",
            "my computer is slow",
            "my dog is sick",
            "i lost my keys",
            "my wifi drops",
        ],
        "field" => &[
            "plot", "star", "producer", "rating", "director", "genre", "writer",
        ],
        "movie" => &[
            "the dark knight",
            "inception",
            "titanic",
            "jaws",
            "the matrix",
            "casablanca",
            "star wars",
            "toy story",
            "the godfather",
            "frozen",
            "avatar",
            "rocky",
        ],
        "genre" => &[
            "action", "comedy", "horror", "drama", "romance", "animated", "sci-fi", "thriller",
        ],
        "music_genre" => &[
            "jazz",
            "rock",
            "pop",
            "country",
            "hip hop",
            "classical",
            "blues",
            "indie",
            "rap",
            "metal",
        ],
        "song" => &[
            "yesterday",
            "hello",
            "thriller",
            "imagine",
            "bad guy",
            "halo",
            "wonderwall",
            "shallow",
        ],
        "singer" => &[
            "adele",
            "beyonce",
            "ed sheeran",
            "rihanna",
            "eminem",
            "coldplay",
            "madonna",
            "the beatles",
        ],
        "opinion_topic" => &[
            "the president",
            "abortion",
            "gun control",
            "religion",
            "politics",
            "immigration",
            "taxes",
            "the election",
            "the death penalty",
            "climate policy",
            "congress",
        ],
        "dish" => &[
            "rice",
            "pasta",
            "pancakes",
            "lasagna",
            "chicken curry",
            "banana bread",
            "tacos",
            "risotto",
            "apple pie",
            "fried rice",
            "chili",
            "omelette",
            "sushi",
            "meatballs",
        ],
        "food_field" => &["ingredients", "directions", "nutrition"],
        "topic" => &[
            "sports",
            "animals",
            "travel",
            "science",
            "history",
            "cars",
            "health",
            "technology",
            "celebrities",
            "space",
            "the weather",
            "art",
            "fashion",
            "nature",
            "books",
            "hobbies",
        ],
        "mumble" => &[
            "um",
            "uh",
            "hmm",
            "blah",
            "er",
            "mm",
            "huh",
            "asdf",
            "la",
            "ugh",
            "eh",
            "the",
            "gah",
            "mmm",
            "whatchamacallit",
            "hm",
            "erm",
            "ah",
            "shh",
            "bzz",
        ],
        _ => &[],
    }
}

/// Expands `{slot}` placeholders with random fillers.
fn fill(template: &str, rng: &mut ChaCha8Rng) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = rest[start..].find('}').map_or(rest.len(), |e| start + e);
        let options = slot(&rest[start + 1..end]);
        if let Some(choice) = options.choose(rng) {
            out.push_str(choice);
        }
        rest = &rest[(end + 1).min(rest.len())..];
    }
    out.push_str(rest);
    out
}

const PREFIXES: &[&str] = &[
    "",
    "",
    "",
    "",
    "",
    "",
    "so ",
    "and ",
    "i said ",
    "alright so ",
];
const SUFFIXES: &[&str] = &["", "", "", "", "", " please", " now", " then", "?", "."];

fn decorate(text: String, label: IntentLabel, rng: &mut ChaCha8Rng) -> String {
    if matches!(label, IntentLabel::Unrecognized) {
        return text;
    }
    let prefix = PREFIXES.choose(rng).copied().unwrap_or("");
    let suffix = SUFFIXES.choose(rng).copied().unwrap_or("");
    format!("{prefix}{text}{suffix}")
}

/// `per_class` utterances for every label, grouped by label in canonical
/// order. The same seed always yields the same corpus.
pub fn generate_corpus(seed: u64, per_class: usize) -> Vec<LabeledText> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * IntentLabel::ALL.len());
    for label in IntentLabel::ALL {
        let ts = templates(label);
        for i in 0..per_class {
            // cycle through templates first so every template is represented
            let template = if i < ts.len() {
                ts[i]
            } else {
                ts[rng.gen_range(0..ts.len())]
            };
            let text = decorate(fill(template, &mut rng), label, &mut rng);
            out.push(LabeledText { label, text });
        }
    }
    out
}

/// Serializes labeled texts in the `label<TAB>text` file format.
pub fn to_tsv(texts: &[LabeledText]) -> String {
    let mut out = String::from("# label\ttext\n");
    for t in texts {
        let _ = writeln!(out, "{}\t{}", t.label.name(), t.text);
    }
    out
}

/// An entity surface with the label an utterance about it should receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntityTarget {
    pub surface: &'static str,
    pub label: IntentLabel,
}

/// Entities from the bundled gazetteer with their intended domain.
pub const ENTITY_TARGETS: &[EntityTarget] = &[
    EntityTarget {
        surface: "Drake",
        label: IntentLabel::Music,
    },
    EntityTarget {
        surface: "Bruno Mars",
        label: IntentLabel::Music,
    },
    EntityTarget {
        surface: "Taylor Swift",
        label: IntentLabel::Music,
    },
    EntityTarget {
        surface: "Lady Gaga",
        label: IntentLabel::Music,
    },
    EntityTarget {
        surface: "Kendrick Lamar",
        label: IntentLabel::Music,
    },
    EntityTarget {
        surface: "Wonder Woman",
        label: IntentLabel::Movies,
    },
    EntityTarget {
        surface: "Harry Potter",
        label: IntentLabel::Movies,
    },
    EntityTarget {
        surface: "Spider-Man",
        label: IntentLabel::Movies,
    },
    EntityTarget {
        surface: "Dunkirk",
        label: IntentLabel::Movies,
    },
    EntityTarget {
        surface: "Donald Trump",
        label: IntentLabel::News,
    },
    EntityTarget {
        surface: "Barack Obama",
        label: IntentLabel::News,
    },
    EntityTarget {
        surface: "Apple",
        label: IntentLabel::Wiki,
    },
    EntityTarget {
        surface: "Mars",
        label: IntentLabel::Wiki,
    },
    EntityTarget {
        surface: "Giant Panda",
        label: IntentLabel::Wiki,
    },
    EntityTarget {
        surface: "Tom Brady",
        label: IntentLabel::Wiki,
    },
    EntityTarget {
        surface: "Guacamole",
        label: IntentLabel::Food,
    },
    EntityTarget {
        surface: "Ramen",
        label: IntentLabel::Food,
    },
];

const ENTITY_TEMPLATES: &[&str] = &[
    "let's talk about {E}",
    "tell me about {E}",
    "i want to talk about {E}",
    "can we talk about {E}",
    "what do you know about {E}",
    "let's chat about {E}",
    "i'm doing great. let's talk about {E}",
];

/// Evaluation set of `size` utterances where `entity_share` of them mention
/// a gazetteer entity. Entity utterances are labeled with the entity's
/// domain; the rest are drawn from the class templates.
pub fn generate_entity_eval(seed: u64, size: usize, entity_share: f64) -> Vec<LabeledText> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_e4a1);
    let entity_count = ((size as f64) * entity_share).ceil() as usize;
    let mut out = Vec::with_capacity(size);
    for _ in 0..entity_count.min(size) {
        let target = ENTITY_TARGETS
            .choose(&mut rng)
            .copied()
            .unwrap_or(ENTITY_TARGETS[0]);
        let template = ENTITY_TEMPLATES.choose(&mut rng).copied().unwrap_or("{E}");
        let text = decorate(
            template.replace("{E}", target.surface),
            target.label,
            &mut rng,
        );
        out.push(LabeledText {
            label: target.label,
            text,
        });
    }
    while out.len() < size {
        let label = IntentLabel::ALL[rng.gen_range(0..IntentLabel::ALL.len())];
        let ts = templates(label);
        let text = decorate(
            fill(ts[rng.gen_range(0..ts.len())], &mut rng),
            label,
            &mut rng,
        );
        out.push(LabeledText { label, text });
    }
    out.shuffle(&mut rng);
    out
}

/// Word clusters that share a direction in the generated embedding space.
const CLUSTERS: &[&[&str]] = &[
    &[
        "yes",
        "sure",
        "okay",
        "ok",
        "yeah",
        "yep",
        "absolutely",
        "definitely",
        "great",
        "good",
        "love",
        "awesome",
        "cool",
        "fine",
        "alright",
        "like",
        "nice",
        "fun",
    ],
    &[
        "no", "nope", "nah", "not", "never", "none", "nothing", "neither", "don't", "hate",
        "boring", "terrible", "awful", "bad", "sad", "stop", "rather", "skip",
    ],
    &[
        "hello", "hi", "hey", "morning", "evening", "night", "bye", "goodbye", "thanks", "thank",
        "name", "friends", "robot", "human", "yourself", "old",
    ],
    &[
        "news",
        "headlines",
        "headline",
        "stories",
        "updates",
        "breaking",
        "latest",
        "happening",
        "president",
        "election",
        "politics",
        "politician",
        "world",
        "economy",
        "today's",
    ],
    &[
        "weather",
        "rain",
        "raining",
        "snow",
        "temperature",
        "hot",
        "cold",
        "sunny",
        "windy",
        "forecast",
        "umbrella",
        "degrees",
        "cloudy",
    ],
    &["joke", "jokes", "funny", "laugh", "humor", "cheer", "knock"],
    &[
        "how", "why", "tips", "fix", "learn", "help", "safe", "best", "way", "fastest", "should",
    ],
    &[
        "movie",
        "movies",
        "film",
        "films",
        "plot",
        "star",
        "producer",
        "rating",
        "director",
        "genre",
        "writer",
        "theaters",
        "watch",
        "directed",
        "stars",
        "playing",
        "actor",
        "character",
        "fictional",
        "superhero",
    ],
    &[
        "music",
        "songs",
        "song",
        "album",
        "albums",
        "charts",
        "jazz",
        "rock",
        "pop",
        "hip",
        "hop",
        "rap",
        "blues",
        "indie",
        "tracks",
        "sings",
        "singer",
        "rapper",
        "band",
        "songwriter",
        "musician",
    ],
    &[
        "opinion",
        "think",
        "view",
        "stance",
        "support",
        "against",
        "religion",
        "vote",
        "agree",
        "abortion",
        "republican",
        "democrat",
        "feel",
    ],
    &[
        "food",
        "recipe",
        "cook",
        "cooking",
        "bake",
        "ingredients",
        "directions",
        "nutrition",
        "calories",
        "dinner",
        "hungry",
        "dish",
        "cuisine",
        "rice",
        "pasta",
        "pancakes",
    ],
    &[
        "talk",
        "topic",
        "topics",
        "discuss",
        "chat",
        "else",
        "switch",
        "change",
        "bored",
        "interesting",
        "surprise",
        "something",
    ],
    &[
        "um",
        "uh",
        "hmm",
        "blah",
        "er",
        "mm",
        "huh",
        "asdf",
        "la",
        "ugh",
        "eh",
        "gah",
        "mmm",
        "hm",
        "erm",
        "ah",
        "shh",
        "bzz",
        "whatchamacallit",
    ],
    &[
        "wikipedia",
        "define",
        "information",
        "facts",
        "history",
        "invented",
        "who",
        "explain",
        "look",
    ],
    &[
        "space",
        "planet",
        "mars",
        "nasa",
        "astronomy",
        "moon",
        "cosmos",
        "rocket",
    ],
    &[
        "technology",
        "company",
        "software",
        "computer",
        "internet",
        "phone",
    ],
];

/// Builds a `dimension`-wide embedding table covering `vocabulary`. Words
/// in a cluster lie near that cluster's random centre; all other words get
/// small random vectors.
pub fn generate_embeddings(
    seed: u64,
    dimension: usize,
    vocabulary: &BTreeSet<String>,
) -> Result<EmbeddingTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = |rng: &mut ChaCha8Rng| -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let centres: Vec<Vec<f64>> = CLUSTERS
        .iter()
        .map(|_| {
            let v: Vec<f64> = (0..dimension).map(|_| gaussian(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let mut membership: BTreeMap<&str, usize> = BTreeMap::new();
    for (c, words) in CLUSTERS.iter().enumerate() {
        for w in *words {
            membership.entry(w).or_insert(c);
        }
    }
    let mut words: BTreeSet<String> = vocabulary.clone();
    words.extend(membership.keys().map(|w| w.to_string()));
    let noise = 0.35 / (dimension as f64).sqrt();
    let mut table = EmbeddingTable::new(dimension)?;
    for w in words {
        let v: Vec<f64> = match membership.get(w.as_str()) {
            Some(&c) => centres[c]
                .iter()
                .map(|x| x + noise * gaussian(&mut rng))
                .collect(),
            None => (0..dimension)
                .map(|_| 0.5 * noise * gaussian(&mut rng))
                .collect(),
        };
        table.insert(w, v.into_iter().map(|x| (x * 1e4).round() / 1e4).collect())?;
    }
    Ok(table)
}

/// Every token produced by the corpus templates and slot fillers.
pub fn template_vocabulary() -> BTreeSet<String> {
    let mut vocab = BTreeSet::new();
    let slots = [
        "thing",
        "name",
        "name_bot",
        "news_topic",
        "person",
        "city",
        "joke_topic",
        "task",
        "problem",
        "field",
        "movie",
        "genre",
        "music_genre",
        "song",
        "singer",
        "opinion_topic",
        "dish",
        "food_field",
        "topic",
        "mumble",
    ];
    for label in IntentLabel::ALL {
        for t in templates(label) {
            vocab.extend(tokenize(&t.replace(['{', '}'], " ")));
        }
    }
    for s in slots {
        for f in slot(s) {
            vocab.extend(tokenize(f));
        }
    }
    for p in PREFIXES.iter().chain(SUFFIXES) {
        vocab.extend(tokenize(p));
    }
    for e in ENTITY_TARGETS {
        vocab.extend(tokenize(e.surface));
    }
    for t in ENTITY_TEMPLATES {
        vocab.extend(tokenize(t));
    }
    vocab
}

/// Writes an embedding table in the plain-text format with a header line.
pub fn embeddings_to_text(table: &EmbeddingTable) -> String {
    let mut out = String::new();
    let mut words: Vec<&str> = table.tokens().collect();
    words.sort_unstable();
    let _ = writeln!(out, "{} {}", words.len(), table.dimension());
    for w in words {
        out.push_str(w);
        for x in table.get(w).unwrap_or(&[]) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}
