use std::path::PathBuf;

use ericson_core::components::{ClientSettings, ComponentId, Components, FeedStore};
use ericson_core::transition::TopicId;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn bundled_data_loads() {
    let components = Components::load(&data_dir(), &ClientSettings::default()).unwrap();
    for id in ComponentId::ALL {
        assert_eq!(components.get(id).id(), id);
    }
}

#[test]
fn every_topic_has_news() {
    let store = FeedStore::load_dir(&data_dir().join("feeds")).unwrap();
    let snapshot = store.snapshot();
    for topic in TopicId::ALL {
        let items = snapshot.get(topic.feed_tag()).map_or(0, Vec::len);
        assert!(items >= 2, "{topic:?} has {items} items");
    }
    assert!(snapshot.contains_key("headlines"));
}

#[test]
fn bundled_config_validates() {
    let config = ericson_core::agent::AgentConfig {
        data_dir: data_dir(),
        ..Default::default()
    };
    config.validate().unwrap();
}

#[test]
fn shipped_model_is_reproducible() {
    use ericson_core::intent::{ClassifierKind, ClassifierModel, TrainerSpec};
    let shipped = ClassifierModel::load(&data_dir().join("model.json")).unwrap();
    let retrained = ericson_core::agent::train_model(
        &data_dir(),
        &TrainerSpec::default_for(ClassifierKind::Gbdt),
    )
    .unwrap();
    assert!(
        retrained == shipped,
        "data/model.json is stale; run `ericson train`"
    );
}
