//! Engagement, proactivity and rating statistics over dialogue logs.

mod engagement;
mod report;
mod stats;
pub mod synthetic;

pub use engagement::{
    component_runs, engagement_depth, engagement_split, ComponentEngagement, EngagementChange,
    EngagementReport, EngagementSplit,
};
pub use report::{
    proactivity_report, rating_series, AnalysisReport, PeriodStats, ProactivityReport, RatingPoint,
};
pub use stats::{
    ln_gamma, mean, percent_change, regularized_incomplete_beta, student_t_two_tailed, variance,
    welch_ttest, TTestResult,
};

use crate::components::ComponentId;
use crate::logger::{load_sessions, TimeRange};
use crate::Result;

/// Loads logs from `dir` and computes every report, splitting at `split_ms`.
pub fn analyze_dir(
    dir: &std::path::Path,
    split_ms: i64,
    range: Option<TimeRange>,
    only: Option<&[ComponentId]>,
) -> Result<AnalysisReport> {
    let logs = load_sessions(dir, range)?;
    let summaries: Vec<_> = logs.sessions.iter().map(|s| s.summary.clone()).collect();
    Ok(AnalysisReport {
        sessions: logs.sessions.len(),
        turns: logs.sessions.iter().map(|s| s.turns.len()).sum(),
        warnings: logs.warnings,
        engagement: engagement_split(&logs.sessions, split_ms, only),
        proactivity: proactivity_report(&summaries, split_ms).ok(),
        ratings: rating_series(&summaries),
    })
}
