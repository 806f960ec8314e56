use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EntityMention, Gazetteer, KnowledgeClient};
use crate::error::{data_lines, read_to_string};
use crate::intent::{ClassifierModel, IntentLabel, Prediction};
use crate::text::{tokenize, FeatureModels, TermWeightModel};
use crate::transition::TopicId;
use crate::{Error, Result};

/// Domain an entity description is matched to: either one of the intent
/// labels or one of the recommendation topics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityClass {
    Intent(IntentLabel),
    Topic(TopicId),
}

impl EntityClass {
    /// Intent label the utterance is re-routed to. Topic entities have no
    /// dedicated component and are answered from the encyclopedia.
    pub fn route_label(self) -> IntentLabel {
        match self {
            EntityClass::Intent(label) => label,
            EntityClass::Topic(_) => IntentLabel::Wiki,
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityClass::Intent(l) => l.fmt(f),
            EntityClass::Topic(t) => t.fmt(f),
        }
    }
}

impl FromStr for EntityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<IntentLabel>()
            .map(EntityClass::Intent)
            .or_else(|_| s.parse::<TopicId>().map(EntityClass::Topic))
            .map_err(|_| Error::Input(format!("'{s}' is neither an intent label nor a topic")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicProfile {
    pub class: EntityClass,
    pub profile_text: String,
}

/// Ordered profiles, at most one per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    profiles: Vec<TopicProfile>,
}

impl ProfileSet {
    pub fn new(profiles: Vec<TopicProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::Config("no topic profiles".into()));
        }
        for (i, p) in profiles.iter().enumerate() {
            if tokenize(&p.profile_text).is_empty() {
                return Err(Error::Config(format!("profile for {} is empty", p.class)));
            }
            if profiles[..i].iter().any(|q| q.class == p.class) {
                return Err(Error::Config(format!("duplicate profile for {}", p.class)));
            }
        }
        Ok(Self { profiles })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// One profile per line: label or topic, tab, profile text.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut profiles = Vec::new();
        for (line, row) in data_lines(text) {
            let (class, profile_text) = row
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line, "expected label<TAB>profile text"))?;
            let class = class
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(origin, line, e.to_string()))?;
            profiles.push(TopicProfile {
                class,
                profile_text: profile_text.trim().to_string(),
            });
        }
        Self::new(profiles).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn profiles(&self) -> &[TopicProfile] {
        &self.profiles
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntityMatch {
    pub class: EntityClass,
    pub similarity: f64,
}

/// Matches a type description against the profiles by term-weight cosine.
/// Weights are fit over the profile texts plus the description itself.
pub fn classify_entity(
    description: &str,
    profiles: &[TopicProfile],
    threshold: f64,
) -> Option<EntityMatch> {
    let query = tokenize(description);
    if query.is_empty() || profiles.is_empty() {
        return None;
    }
    let mut corpus: Vec<Vec<String>> = profiles.iter().map(|p| tokenize(&p.profile_text)).collect();
    corpus.push(query.clone());
    let model = TermWeightModel::fit(&corpus).ok()?;
    let q = model.weigh(&query);
    let mut best: Option<EntityMatch> = None;
    for (profile, tokens) in profiles.iter().zip(&corpus) {
        let similarity = q.cosine(&model.weigh(tokens));
        if best.is_none_or(|b| similarity > b.similarity) {
            best = Some(EntityMatch {
                class: profile.class,
                similarity,
            });
        }
    }
    best.filter(|b| b.similarity > 0.0 && b.similarity >= threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkerConfig {
    pub similarity_threshold: f64,
    /// General predictions scoring below this may be overridden whatever
    /// their label.
    pub override_confidence: f64,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self {
            similarity_threshold: 0.3,
            override_confidence: 0.5,
        }
    }
}

/// Outcome of two-level classification for one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentDecision {
    pub general_label: IntentLabel,
    pub general_score: f64,
    pub general_scores: Vec<(IntentLabel, f64)>,
    /// Leftmost resolved entity.
    pub entity: Option<EntityMention>,
    pub entity_match: Option<EntityMatch>,
    /// Resolved entities after the first.
    pub other_entities: Vec<EntityMention>,
    pub final_label: IntentLabel,
    pub overridden: bool,
    pub knowledge_error: Option<String>,
}

impl IntentDecision {
    /// A decision that just echoes a general prediction.
    pub fn from_prediction(prediction: &Prediction) -> Self {
        Self {
            general_label: prediction.label,
            general_score: prediction.score,
            general_scores: prediction.scores.clone(),
            entity: None,
            entity_match: None,
            other_entities: Vec::new(),
            final_label: prediction.label,
            overridden: false,
            knowledge_error: None,
        }
    }
}

const OVERRIDABLE: [IntentLabel; 4] = [
    IntentLabel::Transition,
    IntentLabel::Unrecognized,
    IntentLabel::SmallTalk,
    IntentLabel::Wiki,
];

/// Second-level classifier: entity detection, description lookup and
/// profile matching on top of a general prediction.
#[derive(Clone)]
pub struct EntityLinker {
    gazetteer: Arc<Gazetteer>,
    knowledge: Arc<dyn KnowledgeClient>,
    profiles: ProfileSet,
    config: LinkerConfig,
}

impl fmt::Debug for EntityLinker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntityLinker")
            .field("gazetteer_entries", &self.gazetteer.len())
            .field("profiles", &self.profiles.profiles().len())
            .field("config", &self.config)
            .finish()
    }
}

impl EntityLinker {
    pub fn new(
        gazetteer: Arc<Gazetteer>,
        knowledge: Arc<dyn KnowledgeClient>,
        profiles: ProfileSet,
        config: LinkerConfig,
    ) -> Result<Self> {
        let t = config.similarity_threshold;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!(
                "similarity threshold {t} outside [0, 1]"
            )));
        }
        let c = config.override_confidence;
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Config(format!(
                "override confidence {c} outside [0, 1]"
            )));
        }
        Ok(Self {
            gazetteer,
            knowledge,
            profiles,
            config,
        })
    }

    /// Linker whose knowledge source is the gazetteer itself.
    pub fn offline(
        gazetteer: Arc<Gazetteer>,
        profiles: ProfileSet,
        config: LinkerConfig,
    ) -> Result<Self> {
        let knowledge: Arc<dyn KnowledgeClient> = gazetteer.clone();
        Self::new(gazetteer, knowledge, profiles, config)
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn profiles(&self) -> &ProfileSet {
        &self.profiles
    }

    pub fn config(&self) -> LinkerConfig {
        self.config
    }

    pub fn classify_description(&self, description: &str) -> Option<EntityMatch> {
        classify_entity(
            description,
            self.profiles.profiles(),
            self.config.similarity_threshold,
        )
    }

    /// Gazetteer mentions whose description the knowledge client resolved.
    /// A client error stops resolution and is returned alongside.
    pub fn resolve<S: AsRef<str>>(&self, tokens: &[S]) -> (Vec<EntityMention>, Option<String>) {
        let mut resolved = Vec::new();
        for mut mention in self.gazetteer.detect_entities(tokens) {
            match self.knowledge.lookup(&mention.surface) {
                Ok(Some(hit)) => {
                    mention.description = hit.description;
                    mention.source = hit.source;
                    resolved.push(mention);
                }
                Ok(None) => {}
                Err(e) => return (Vec::new(), Some(e.to_string())),
            }
        }
        (resolved, None)
    }

    /// Applies the override rule to a general prediction.
    pub fn decide<S: AsRef<str>>(&self, prediction: &Prediction, tokens: &[S]) -> IntentDecision {
        let mut decision = IntentDecision::from_prediction(prediction);
        let (mut mentions, error) = self.resolve(tokens);
        decision.knowledge_error = error;
        if mentions.is_empty() {
            return decision;
        }
        let first = mentions.remove(0);
        decision.entity_match = self.classify_description(&first.description);
        decision.entity = Some(first);
        decision.other_entities = mentions;
        if let Some(m) = decision.entity_match {
            let may_override = OVERRIDABLE.contains(&prediction.label)
                || prediction.score < self.config.override_confidence;
            if may_override {
                decision.final_label = m.class.route_label();
                decision.overridden = decision.final_label != decision.general_label;
            }
        }
        decision
    }

    /// General classifier followed by the entity-based second level.
    pub fn hierarchical_classify(
        &self,
        model: &ClassifierModel,
        features: &FeatureModels,
        text: &str,
    ) -> Result<IntentDecision> {
        let tokens = tokenize(text);
        let prediction = model.predict(&features.featurize_tokens(&tokens))?;
        Ok(self.decide(&prediction, &tokens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::{GazetteerEntry, KnowledgeHit};
    use proptest::prelude::*;

    fn profiles() -> ProfileSet {
        ProfileSet::parse(
            "Music\tsinger rapper songwriter\n\
             Movie\tfilm movie fictional character\n\
             News\tnews president politics\n\
             Technology\ttechnology company software\n\
             Space\tspace planet astronomy\n",
            Path::new("p.tsv"),
        )
        .unwrap()
    }

    fn prediction(label: IntentLabel, score: f64) -> Prediction {
        Prediction {
            label,
            score,
            scores: vec![(label, score)],
        }
    }

    fn linker() -> EntityLinker {
        let g = Gazetteer::new(vec![
            GazetteerEntry {
                surface: "Bruno Mars".into(),
                description: "American singer-songwriter".into(),
            },
            GazetteerEntry {
                surface: "Mars".into(),
                description: "Planet".into(),
            },
            GazetteerEntry {
                surface: "Boston".into(),
                description: "City in Massachusetts".into(),
            },
        ])
        .unwrap();
        EntityLinker::offline(Arc::new(g), profiles(), LinkerConfig::default()).unwrap()
    }

    #[test]
    fn descriptions_map_to_classes() {
        let p = profiles();
        let class = |d: &str| classify_entity(d, p.profiles(), 0.3).map(|m| m.class);
        assert_eq!(
            class("Canadian rapper"),
            Some(EntityClass::Intent(IntentLabel::Music))
        );
        assert_eq!(
            class("Fictional character"),
            Some(EntityClass::Intent(IntentLabel::Movies))
        );
        assert_eq!(
            class("Technology company"),
            Some(EntityClass::Topic(TopicId::Technology))
        );
        assert_eq!(class("zebra crossing"), None);
        assert_eq!(classify_entity("zebra", p.profiles(), 0.0), None);
    }

    #[test]
    fn class_names_parse() {
        assert_eq!(
            "Movie".parse::<EntityClass>().unwrap(),
            EntityClass::Intent(IntentLabel::Movies)
        );
        assert_eq!(
            "Space".parse::<EntityClass>().unwrap(),
            EntityClass::Topic(TopicId::Space)
        );
        assert!("Sandwich".parse::<EntityClass>().is_err());
        assert_eq!(
            EntityClass::Topic(TopicId::Space).route_label(),
            IntentLabel::Wiki
        );
    }

    #[test]
    fn transition_with_singer_becomes_music() {
        let d = linker().decide(
            &prediction(IntentLabel::Transition, 0.9),
            &tokenize("let's talk about Bruno Mars"),
        );
        assert_eq!(d.final_label, IntentLabel::Music);
        assert!(d.overridden);
        assert_eq!(d.entity.unwrap().surface, "Bruno Mars");
    }

    #[test]
    fn confident_specific_label_is_kept() {
        let l = linker();
        let d = l.decide(
            &prediction(IntentLabel::Weather, 0.95),
            &tokenize("what's the weather in boston"),
        );
        assert_eq!(d.final_label, IntentLabel::Weather);
        assert!(!d.overridden);
        let d = l.decide(
            &prediction(IntentLabel::News, 0.9),
            &tokenize("news about mars"),
        );
        assert!(!d.overridden);
        let d = l.decide(
            &prediction(IntentLabel::News, 0.4),
            &tokenize("news about mars"),
        );
        assert_eq!(d.final_label, IntentLabel::Wiki);
        assert!(d.overridden);
    }

    #[test]
    fn same_label_override_is_not_flagged() {
        let d = linker().decide(
            &prediction(IntentLabel::Wiki, 0.9),
            &tokenize("what is mars"),
        );
        assert_eq!(d.final_label, IntentLabel::Wiki);
        assert!(!d.overridden);
        assert!(d.entity_match.is_some());
    }

    struct Failing;
    impl KnowledgeClient for Failing {
        fn lookup(&self, _: &str) -> Result<Option<KnowledgeHit>> {
            Err(Error::Input("service down".into()))
        }
    }

    #[test]
    fn knowledge_failure_keeps_general_label() {
        let l = linker();
        let l = EntityLinker::new(
            l.gazetteer.clone(),
            Arc::new(Failing),
            profiles(),
            LinkerConfig::default(),
        )
        .unwrap();
        let d = l.decide(
            &prediction(IntentLabel::Transition, 0.9),
            &tokenize("let's talk about Bruno Mars"),
        );
        assert_eq!(d.final_label, IntentLabel::Transition);
        assert!(!d.overridden && d.entity.is_none());
        assert!(d.knowledge_error.unwrap().contains("service down"));
    }

    #[test]
    fn bad_config_rejected() {
        let l = linker();
        let cfg = LinkerConfig {
            similarity_threshold: 1.5,
            ..LinkerConfig::default()
        };
        assert!(EntityLinker::offline(l.gazetteer.clone(), profiles(), cfg).is_err());
    }

    proptest! {
        #[test]
        fn similarity_is_scale_invariant(
            a in prop::collection::vec(0.0f64..5.0, 6),
            b in prop::collection::vec(0.0f64..5.0, 6),
            s in 0.01f64..100.0,
        ) {
            let scaled: Vec<f64> = a.iter().map(|x| x * s).collect();
            let base = crate::text::cosine(&a, &b).unwrap();
            let after = crate::text::cosine(&scaled, &b).unwrap();
            prop_assert!((base - after).abs() < 1e-9);
        }

        #[test]
        fn overrides_stay_in_label_set(label_index in 0usize..14, score in 0.0f64..1.0, which in 0usize..3) {
            let text = ["let's talk about bruno mars", "what about mars", "boston"][which];
            let d = linker().decide(&prediction(IntentLabel::ALL[label_index], score), &tokenize(text));
            prop_assert!(IntentLabel::ALL.contains(&d.final_label));
            prop_assert_eq!(d.overridden, d.final_label != d.general_label);
            prop_assert!(!d.overridden || d.entity.is_some());
        }
    }
}
