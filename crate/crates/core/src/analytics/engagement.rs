use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{percent_change, welch_ttest, TTestResult};
use crate::components::ComponentId;
use crate::logger::SessionLog;

/// Maximal runs of the same component, in order.
pub fn component_runs(sequence: &[ComponentId]) -> Vec<(ComponentId, u32)> {
    let mut runs: Vec<(ComponentId, u32)> = Vec::new();
    for &c in sequence {
        match runs.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => runs.push((c, 1)),
        }
    }
    runs
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentEngagement {
    pub runs: u32,
    pub turns: u32,
    /// Mean run length in turns.
    pub average: f64,
    pub run_lengths: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EngagementReport {
    pub components: BTreeMap<ComponentId, ComponentEngagement>,
}

impl EngagementReport {
    pub fn average(&self, component: ComponentId) -> Option<f64> {
        self.components.get(&component).map(|c| c.average)
    }
}

/// Engagement depth over sessions given as component sequences.
pub fn engagement_depth<'a, I>(sessions: I) -> EngagementReport
where
    I: IntoIterator<Item = &'a [ComponentId]>,
{
    let mut components: BTreeMap<ComponentId, ComponentEngagement> = BTreeMap::new();
    for sequence in sessions {
        for (c, n) in component_runs(sequence) {
            let e = components.entry(c).or_default();
            e.runs += 1;
            e.turns += n;
            e.run_lengths.push(n);
        }
    }
    for e in components.values_mut() {
        e.average = f64::from(e.turns) / f64::from(e.runs);
    }
    EngagementReport { components }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementChange {
    pub component: ComponentId,
    pub before: Option<f64>,
    pub after: Option<f64>,
    pub percent_change: Option<f64>,
    /// Welch test over run lengths, when both sides have at least two runs.
    pub test: Option<TTestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementSplit {
    pub split_ms: i64,
    pub before: EngagementReport,
    pub after: EngagementReport,
    pub changes: Vec<EngagementChange>,
}

/// Engagement before and after `split_ms` (by session start), optionally
/// restricted to `only`.
pub fn engagement_split(
    sessions: &[SessionLog],
    split_ms: i64,
    only: Option<&[ComponentId]>,
) -> EngagementSplit {
    let sequences = |after: bool| -> Vec<Vec<ComponentId>> {
        sessions
            .iter()
            .filter(|s| (s.summary.started_ms >= split_ms) == after)
            .map(SessionLog::components)
            .collect()
    };
    let keep = |mut r: EngagementReport| {
        if let Some(only) = only {
            r.components.retain(|c, _| only.contains(c));
        }
        r
    };
    let (b, a) = (sequences(false), sequences(true));
    let before = keep(engagement_depth(b.iter().map(Vec::as_slice)));
    let after = keep(engagement_depth(a.iter().map(Vec::as_slice)));
    let mut ids: Vec<ComponentId> = before
        .components
        .keys()
        .chain(after.components.keys())
        .copied()
        .collect();
    ids.sort();
    ids.dedup();
    let changes = ids
        .into_iter()
        .map(|c| {
            let (x, y) = (before.components.get(&c), after.components.get(&c));
            let lengths = |e: &ComponentEngagement| {
                e.run_lengths
                    .iter()
                    .map(|&n| f64::from(n))
                    .collect::<Vec<_>>()
            };
            EngagementChange {
                component: c,
                before: x.map(|e| e.average),
                after: y.map(|e| e.average),
                percent_change: x
                    .zip(y)
                    .and_then(|(x, y)| percent_change(x.average, y.average).ok()),
                test: x
                    .zip(y)
                    .and_then(|(x, y)| welch_ttest(&lengths(x), &lengths(y)).ok()),
            }
        })
        .collect();
    EngagementSplit {
        split_ms,
        before,
        after,
        changes,
    }
}
