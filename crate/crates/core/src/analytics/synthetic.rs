//! Synthetic session logs with controlled means, for exercising the
//! analytics end to end.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::components::ComponentId;
use crate::dialogue::{DialogueStateId, RouteReason, SessionId, TopState};
use crate::intent::IntentLabel;
use crate::logger::{
    DecisionSummary, DialogueLog, SessionStart, SessionSummary, TurnRecord, LOG_SCHEMA_VERSION,
};
use crate::Result;

/// Targets for one period of synthetic sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSpec {
    pub sessions: usize,
    pub start_ms: i64,
    pub mean_turns: f64,
    pub mean_rating: f64,
    /// Each session holds exactly one run of News turns.
    pub mean_news_run: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSession {
    pub start: SessionStart,
    pub turns: Vec<TurnRecord>,
    pub summary: SessionSummary,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `n` integers in `lo..=hi`, roughly normal around `mean`, whose sum is
/// exactly `round(mean * n)`.
pub fn integer_sample(
    rng: &mut ChaCha8Rng,
    n: usize,
    mean: f64,
    sd: f64,
    lo: u32,
    hi: u32,
) -> Vec<u32> {
    assert!(n > 0 && lo <= hi);
    let target = ((mean * n as f64).round() as i64)
        .clamp(i64::from(lo) * n as i64, i64::from(hi) * n as i64);
    let mut xs: Vec<u32> = (0..n)
        .map(|_| {
            (mean + sd * normal(rng))
                .round()
                .clamp(f64::from(lo), f64::from(hi)) as u32
        })
        .collect();
    let mut sum: i64 = xs.iter().map(|&x| i64::from(x)).sum();
    while sum != target {
        let i = rng.gen_range(0..n);
        if sum < target && xs[i] < hi {
            xs[i] += 1;
            sum += 1;
        } else if sum > target && xs[i] > lo {
            xs[i] -= 1;
            sum -= 1;
        }
    }
    xs
}

const FILLERS: [ComponentId; 6] = [
    ComponentId::SmallTalk,
    ComponentId::Movies,
    ComponentId::Joke,
    ComponentId::Music,
    ComponentId::Wiki,
    ComponentId::Food,
];

/// Sessions meeting `spec` exactly in their means. Ids are `{prefix}{i}`.
pub fn synthetic_period(seed: u64, spec: &PeriodSpec, prefix: &str) -> Vec<SyntheticSession> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.sessions;
    let news = integer_sample(&mut rng, n, spec.mean_news_run, 1.0, 1, 12);
    let extra = integer_sample(
        &mut rng,
        n,
        spec.mean_turns - spec.mean_news_run,
        4.0,
        0,
        60,
    );
    let ratings = integer_sample(&mut rng, n, spec.mean_rating, 1.1, 1, 5);
    (0..n)
        .map(|i| {
            let id = SessionId::try_from(format!("{prefix}{i}")).expect("valid synthetic id");
            let started_ms = spec.start_ms + i as i64 * 60_000;
            let sequence: Vec<ComponentId> =
                std::iter::repeat_n(ComponentId::News, news[i] as usize)
                    .chain((0..extra[i] as usize).map(|k| FILLERS[k % FILLERS.len()]))
                    .collect();
            let turns: Vec<TurnRecord> = sequence
                .iter()
                .enumerate()
                .map(|(k, &component)| TurnRecord {
                    schema: LOG_SCHEMA_VERSION,
                    session_id: id.clone(),
                    turn_index: k as u32 + 1,
                    timestamp_ms: started_ms + k as i64 * 1000,
                    user_text: format!("synthetic utterance {}", k + 1),
                    resolved_text: format!("synthetic utterance {}", k + 1),
                    decision: DecisionSummary {
                        general_label: IntentLabel::Unrecognized,
                        general_score: 1.0,
                        final_label: IntentLabel::Unrecognized,
                        overridden: false,
                        entity: None,
                        entity_class: None,
                    },
                    state_before: DialogueStateId::new(TopState::NewTopic),
                    state_after: DialogueStateId::new(TopState::NewTopic),
                    component,
                    route_reason: RouteReason::Classifier,
                    response_text: format!("synthetic response {}", k + 1),
                    suggestion: None,
                    latency_ms: 0.0,
                    error: None,
                })
                .collect();
            let mut component_turns = BTreeMap::new();
            for c in &sequence {
                *component_turns.entry(*c).or_default() += 1;
            }
            let ended_ms = started_ms + turns.len() as i64 * 1000;
            SyntheticSession {
                start: SessionStart {
                    schema: LOG_SCHEMA_VERSION,
                    session_id: id.clone(),
                    seed: seed ^ i as u64,
                    started_ms,
                },
                summary: SessionSummary {
                    schema: LOG_SCHEMA_VERSION,
                    session_id: id,
                    turn_count: turns.len() as u32,
                    rating: Some(ratings[i] as u8),
                    feedback: None,
                    component_turns,
                    started_ms,
                    ended_ms,
                },
                turns,
            }
        })
        .collect()
}

/// Appends `sessions` to `log` and finalizes each with its rating.
pub fn write_sessions(log: &DialogueLog, sessions: &[SyntheticSession]) -> Result<()> {
    for s in sessions {
        log.start_session(s.start.clone())?;
        for t in &s.turns {
            log.append_turn(t)?;
        }
        log.finalize_session(
            &s.summary.session_id,
            s.summary.rating,
            None,
            s.summary.ended_ms,
        )?;
    }
    Ok(())
}
