use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::engagement::EngagementSplit;
use super::stats::{mean, percent_change, welch_ttest, TTestResult};
use crate::logger::SessionSummary;
use crate::{Error, Result};

fn day_of(ms: i64) -> NaiveDate {
    DateTime::<Utc>::from_timestamp_millis(ms)
        .unwrap_or_default()
        .date_naive()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingPoint {
    pub date: NaiveDate,
    pub mean_rating: f64,
    pub count: usize,
}

/// Mean rating per UTC day of session start; unrated sessions are skipped.
pub fn rating_series(summaries: &[SessionSummary]) -> Vec<RatingPoint> {
    let mut days: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for s in summaries {
        if let Some(r) = s.rating {
            days.entry(day_of(s.started_ms))
                .or_default()
                .push(f64::from(r));
        }
    }
    days.into_iter()
        .map(|(date, ratings)| RatingPoint {
            date,
            mean_rating: mean(&ratings),
            count: ratings.len(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodStats {
    pub sessions: usize,
    pub mean_turns: f64,
    pub rated: usize,
    pub mean_rating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProactivityReport {
    pub split_ms: i64,
    pub before: PeriodStats,
    pub after: PeriodStats,
    pub turns_change: f64,
    pub turns_test: TTestResult,
    pub rating_change: Option<f64>,
    pub rating_test: Option<TTestResult>,
}

/// Turns and ratings before versus after `split_ms` (by session start).
pub fn proactivity_report(
    summaries: &[SessionSummary],
    split_ms: i64,
) -> Result<ProactivityReport> {
    let (after, before): (Vec<&SessionSummary>, Vec<&SessionSummary>) =
        summaries.iter().partition(|s| s.started_ms >= split_ms);
    if before.is_empty() || after.is_empty() {
        return Err(Error::Input(format!(
            "both sides of the split need sessions (before: {}, after: {})",
            before.len(),
            after.len()
        )));
    }
    let turns = |side: &[&SessionSummary]| {
        side.iter()
            .map(|s| f64::from(s.turn_count))
            .collect::<Vec<_>>()
    };
    let ratings = |side: &[&SessionSummary]| {
        side.iter()
            .filter_map(|s| s.rating.map(f64::from))
            .collect::<Vec<_>>()
    };
    let stats = |side: &[&SessionSummary]| {
        let r = ratings(side);
        PeriodStats {
            sessions: side.len(),
            mean_turns: mean(&turns(side)),
            rated: r.len(),
            mean_rating: (!r.is_empty()).then(|| mean(&r)),
        }
    };
    let (b, a) = (stats(&before), stats(&after));
    let (rb, ra) = (ratings(&before), ratings(&after));
    Ok(ProactivityReport {
        split_ms,
        turns_change: percent_change(b.mean_turns, a.mean_turns)?,
        turns_test: welch_ttest(&turns(&before), &turns(&after))?,
        rating_change: b
            .mean_rating
            .zip(a.mean_rating)
            .and_then(|(x, y)| percent_change(x, y).ok()),
        rating_test: welch_ttest(&rb, &ra).ok(),
        before: b,
        after: a,
    })
}

/// Everything `analyze` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub sessions: usize,
    pub turns: usize,
    pub warnings: usize,
    pub engagement: EngagementSplit,
    pub proactivity: Option<ProactivityReport>,
    pub ratings: Vec<RatingPoint>,
}

fn pct(x: Option<f64>) -> String {
    x.map_or("-".into(), |x| format!("{:+.1}%", x * 100.0))
}

fn num(x: Option<f64>) -> String {
    x.map_or("-".into(), |x| format!("{x:.3}"))
}

fn p_value(t: Option<&TTestResult>) -> String {
    match t {
        Some(t) if t.p < 0.001 => "<0.001".into(),
        Some(t) => format!("{:.3}", t.p),
        None => "-".into(),
    }
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let split = DateTime::<Utc>::from_timestamp_millis(self.engagement.split_ms)
            .map_or_else(String::new, |d| d.format("%Y-%m-%d").to_string());
        let _ = writeln!(
            out,
            "{} sessions, {} turns, {} corrupt records skipped",
            self.sessions, self.turns, self.warnings
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Engagement (average consecutive turns per component), split at {split}"
        );
        let _ = writeln!(
            out,
            "{:<14} {:>8} {:>8} {:>9} {:>8}",
            "Component", "Before", "After", "Change", "p"
        );
        for c in &self.engagement.changes {
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>9} {:>8}",
                c.component.name(),
                num(c.before),
                num(c.after),
                pct(c.percent_change),
                p_value(c.test.as_ref())
            );
        }
        if let Some(p) = &self.proactivity {
            let _ = writeln!(out);
            let _ = writeln!(out, "Proactivity, split at {split}");
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>9} {:>8}",
                "Measure", "Before", "After", "Change", "p"
            );
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>9} {:>8}",
                "Turns",
                num(Some(p.before.mean_turns)),
                num(Some(p.after.mean_turns)),
                pct(Some(p.turns_change)),
                p_value(Some(&p.turns_test))
            );
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>9} {:>8}",
                "Rating",
                num(p.before.mean_rating),
                num(p.after.mean_rating),
                pct(p.rating_change),
                p_value(p.rating_test.as_ref())
            );
        }
        if !self.ratings.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "Daily ratings");
            let _ = writeln!(out, "{:<12} {:>6} {:>6}", "Date", "Mean", "Count");
            for r in &self.ratings {
                let _ = writeln!(out, "{:<12} {:>6.3} {:>6}", r.date, r.mean_rating, r.count);
            }
        }
        out
    }
}
