use std::io::Write;

use proptest::prelude::*;

use super::*;
use crate::components::ComponentId;
use crate::dialogue::{DialogueStateId, RouteReason, SessionId, TopState};
use crate::intent::IntentLabel;
use crate::Error;

const DAY_MS: i64 = 86_400_000;
const T0: i64 = 1_504_224_000_000; // 2017-09-01

fn id(s: &str) -> SessionId {
    s.parse().unwrap()
}

fn start(log: &DialogueLog, s: &str, at: i64) {
    log.start_session(SessionStart {
        schema: LOG_SCHEMA_VERSION,
        session_id: id(s),
        seed: 42,
        started_ms: at,
    })
    .unwrap();
}

fn turn(s: &str, index: u32, at: i64, component: ComponentId) -> TurnRecord {
    TurnRecord {
        schema: LOG_SCHEMA_VERSION,
        session_id: id(s),
        turn_index: index,
        timestamp_ms: at,
        user_text: format!("utterance {index}"),
        resolved_text: format!("utterance {index}"),
        decision: DecisionSummary {
            general_label: IntentLabel::Movies,
            general_score: 0.75,
            final_label: IntentLabel::Movies,
            overridden: false,
            entity: None,
            entity_class: None,
        },
        state_before: DialogueStateId::new(TopState::NewTopic),
        state_after: DialogueStateId::with_sub(TopState::Movies, "offer_details"),
        component,
        route_reason: RouteReason::Classifier,
        response_text: format!("reply {index}"),
        suggestion: None,
        latency_ms: 1.25,
        error: None,
    }
}

#[test]
fn turn_files_are_named_by_utc_day() {
    assert_eq!(turn_file_name(T0), "turns-2017-09-01.jsonl");
    assert_eq!(turn_file_name(T0 + DAY_MS - 1), "turns-2017-09-01.jsonl");
    assert_eq!(turn_file_name(T0 + DAY_MS), "turns-2017-09-02.jsonl");
}

#[test]
fn indices_must_be_contiguous_from_one() {
    let dir = tempfile::tempdir().unwrap();
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "a", T0);
    assert!(matches!(
        log.append_turn(&turn("a", 2, T0, ComponentId::Movies)),
        Err(Error::Sequencing {
            expected: 1,
            found: 2,
            ..
        })
    ));
    log.append_turn(&turn("a", 1, T0, ComponentId::Movies))
        .unwrap();
    assert!(matches!(
        log.append_turn(&turn("a", 3, T0, ComponentId::Movies)),
        Err(Error::Sequencing {
            expected: 2,
            found: 3,
            ..
        })
    ));
    assert!(matches!(
        log.append_turn(&turn("ghost", 1, T0, ComponentId::Movies)),
        Err(Error::NotFound(_))
    ));
}

#[test]
fn interleaved_sessions_append_independently() {
    let dir = tempfile::tempdir().unwrap();
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "a", T0);
    start(&log, "b", T0 + 1);
    for i in 1..=3 {
        log.append_turn(&turn("a", i, T0 + i as i64, ComponentId::News))
            .unwrap();
        log.append_turn(&turn("b", i, T0 + i as i64, ComponentId::Joke))
            .unwrap();
    }
    let loaded = load_sessions(dir.path(), None).unwrap();
    assert_eq!(loaded.sessions.len(), 2);
    assert_eq!(loaded.sessions[0].id, id("a"));
    assert!(loaded.sessions.iter().all(|s| s.turns.len() == 3));
    assert_eq!(log.session_turns(&id("b")).unwrap().len(), 3);
}

#[test]
fn finalize_summarizes_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "s", T0);
    for i in 1..=5 {
        let c = if i < 4 {
            ComponentId::Movies
        } else {
            ComponentId::Music
        };
        log.append_turn(&turn("s", i, T0 + 1000 * i as i64, c))
            .unwrap();
    }
    let summary = log
        .finalize_session(&id("s"), Some(3), None, T0 + 10_000)
        .unwrap();
    assert_eq!(summary.turn_count, 5);
    assert_eq!(summary.rating, Some(3));
    assert_eq!(summary.component_turns[&ComponentId::Movies], 3);
    assert_eq!(summary.ended_ms, T0 + 10_000);
    assert_eq!(
        log.finalize_session(&id("s"), Some(3), None, T0 + 99_999)
            .unwrap(),
        summary
    );
    assert!(matches!(
        log.finalize_session(&id("s"), Some(4), None, T0),
        Err(Error::Conflict(_))
    ));
    assert!(matches!(
        log.append_turn(&turn("s", 6, T0, ComponentId::Movies)),
        Err(Error::Conflict(_))
    ));
    assert!(matches!(
        log.finalize_session(&id("nobody"), None, None, T0),
        Err(Error::NotFound(_))
    ));

    let reopened = DialogueLog::open(dir.path()).unwrap();
    assert_eq!(reopened.summary(&id("s")).unwrap(), summary);
    assert_eq!(reopened.is_finalized(&id("s")), Some(true));
}

#[test]
fn unrated_and_invalid_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "s", T0);
    assert!(matches!(
        log.finalize_session(&id("s"), Some(6), None, T0),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        log.finalize_session(&id("s"), Some(0), None, T0),
        Err(Error::Input(_))
    ));
    let summary = log
        .finalize_session(&id("s"), None, Some("fun".into()), T0)
        .unwrap();
    assert_eq!(summary.rating, None);
    assert_eq!(summary.turn_count, 0);
}

#[test]
fn empty_and_filtered_loads() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_sessions(&dir.path().join("missing"), None)
        .unwrap()
        .sessions
        .is_empty());
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "s", T0);
    let range = TimeRange {
        from_ms: T0 + DAY_MS,
        to_ms: T0 + 2 * DAY_MS,
    };
    assert!(load_sessions(dir.path(), Some(range))
        .unwrap()
        .sessions
        .is_empty());
    let range = TimeRange {
        from_ms: T0,
        to_ms: T0 + 1,
    };
    assert_eq!(
        load_sessions(dir.path(), Some(range))
            .unwrap()
            .sessions
            .len(),
        1
    );
}

#[test]
fn corrupt_lines_are_counted_and_partial_lines_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let log = DialogueLog::open(dir.path()).unwrap();
    start(&log, "s", T0);
    for i in 1..=9 {
        log.append_turn(&turn("s", i, T0, ComponentId::News))
            .unwrap();
    }
    let path = dir.path().join(turn_file_name(T0));
    let mut file = std::fs::OpenOptions::new()
        .append(true)
        .open(&path)
        .unwrap();
    file.write_all(b"{not json\n{\"session_id\":\"s\",\"turn_in")
        .unwrap();
    let loaded = load_sessions(dir.path(), None).unwrap();
    assert_eq!(loaded.sessions[0].turns.len(), 9);
    assert_eq!(loaded.warnings, 1);
}

fn arb_turn() -> impl Strategy<Value = (String, String, f64, Option<String>, u8)> {
    (
        "[a-zA-Z ,.'?!éü]{0,40}",
        "[a-z ]{0,40}",
        0.0f64..1.0,
        proptest::option::of("[a-z]{1,10}"),
        0u8..12,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn append_then_load_round_trips(turns in proptest::collection::vec(arb_turn(), 0..8), day in 0i64..40) {
        let dir = tempfile::tempdir().unwrap();
        let log = DialogueLog::open(dir.path()).unwrap();
        let at = T0 + day * DAY_MS;
        start(&log, "p", at);
        let mut written = Vec::new();
        for (i, (user, response, score, entity, c)) in turns.into_iter().enumerate() {
            let mut t = turn("p", i as u32 + 1, at + i as i64 * 3_600_000, ComponentId::ALL[c as usize]);
            t.user_text = user;
            t.response_text = response;
            t.decision.general_score = score;
            t.decision.entity = entity;
            log.append_turn(&t).unwrap();
            written.push(t);
        }
        let loaded = load_sessions(dir.path(), None).unwrap();
        prop_assert_eq!(loaded.warnings, 0);
        prop_assert_eq!(&loaded.sessions[0].turns, &written);
        prop_assert_eq!(loaded.sessions[0].summary.turn_count as usize, written.len());
    }
}
