use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Row group of an intent label in evaluation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntentGroup {
    Sentiment,
    InformationRetrieval,
    Transitional,
}

impl IntentGroup {
    pub fn abbreviation(self) -> &'static str {
        match self {
            IntentGroup::Sentiment => "S",
            IntentGroup::InformationRetrieval => "IR",
            IntentGroup::Transitional => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntentLabel {
    Positive,
    Negative,
    SmallTalk,
    News,
    Wiki,
    Weather,
    Joke,
    LiveQa,
    Movies,
    Music,
    Opinion,
    Food,
    Transition,
    Unrecognized,
}

impl IntentLabel {
    pub const ALL: [IntentLabel; 14] = [
        IntentLabel::Positive,
        IntentLabel::Negative,
        IntentLabel::SmallTalk,
        IntentLabel::News,
        IntentLabel::Wiki,
        IntentLabel::Weather,
        IntentLabel::Joke,
        IntentLabel::LiveQa,
        IntentLabel::Movies,
        IntentLabel::Music,
        IntentLabel::Opinion,
        IntentLabel::Food,
        IntentLabel::Transition,
        IntentLabel::Unrecognized,
    ];

    pub fn group(self) -> IntentGroup {
        use IntentLabel::*;
        match self {
            Positive | Negative => IntentGroup::Sentiment,
            Transition | Unrecognized => IntentGroup::Transitional,
            _ => IntentGroup::InformationRetrieval,
        }
    }

    pub fn name(self) -> &'static str {
        use IntentLabel::*;
        match self {
            Positive => "Positive",
            Negative => "Negative",
            SmallTalk => "SmallTalk",
            News => "News",
            Wiki => "Wiki",
            Weather => "Weather",
            Joke => "Joke",
            LiveQa => "LiveQA",
            Movies => "Movies",
            Music => "Music",
            Opinion => "Opinion",
            Food => "Food",
            Transition => "Transition",
            Unrecognized => "Unrecognized",
        }
    }

    /// Human-readable row title used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            IntentLabel::SmallTalk => "Small Talk",
            other => other.name(),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for IntentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntentLabel {
    type Err = Error;

    /// Case-insensitive; spaces, dashes and underscores are ignored, and a
    /// few common aliases ("movie", "jokes", "small-talk") are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        let label = match key.as_str() {
            "positive" => IntentLabel::Positive,
            "negative" => IntentLabel::Negative,
            "smalltalk" => IntentLabel::SmallTalk,
            "news" => IntentLabel::News,
            "wiki" | "wikiinfo" => IntentLabel::Wiki,
            "weather" => IntentLabel::Weather,
            "joke" | "jokes" => IntentLabel::Joke,
            "liveqa" => IntentLabel::LiveQa,
            "movies" | "movie" => IntentLabel::Movies,
            "music" => IntentLabel::Music,
            "opinion" | "opinions" => IntentLabel::Opinion,
            "food" => IntentLabel::Food,
            "transition" => IntentLabel::Transition,
            "unrecognized" => IntentLabel::Unrecognized,
            _ => return Err(Error::Input(format!("unknown intent label '{s}'"))),
        };
        Ok(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_labels_in_two_ten_two_groups() {
        assert_eq!(IntentLabel::ALL.len(), 14);
        let count = |g| IntentLabel::ALL.iter().filter(|l| l.group() == g).count();
        assert_eq!(count(IntentGroup::Sentiment), 2);
        assert_eq!(count(IntentGroup::InformationRetrieval), 10);
        assert_eq!(count(IntentGroup::Transitional), 2);
    }

    #[test]
    fn names_round_trip() {
        for l in IntentLabel::ALL {
            assert_eq!(l.name().parse::<IntentLabel>().unwrap(), l);
            assert_eq!(IntentLabel::ALL[l.index()], l);
        }
        assert_eq!(
            "small-talk".parse::<IntentLabel>().unwrap(),
            IntentLabel::SmallTalk
        );
        assert_eq!("Movie".parse::<IntentLabel>().unwrap(), IntentLabel::Movies);
        assert!("sports".parse::<IntentLabel>().is_err());
    }
}
