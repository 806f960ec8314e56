use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

/// Latency samples kept for percentiles.
pub const LATENCY_WINDOW: usize = 10_000;

#[derive(Debug, Default)]
pub struct Metrics {
    sessions_created: u64,
    sessions_finalized: u64,
    sessions_expired: u64,
    turns: u64,
    component_errors: u64,
    log_failures: u64,
    latencies: VecDeque<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    /// Created and not yet finalized.
    pub sessions_active: u64,
    pub sessions_created: u64,
    pub sessions_finalized: u64,
    pub sessions_expired: u64,
    pub turns: u64,
    pub component_errors: u64,
    pub log_failures: u64,
    pub latency_p50_ms: Option<f64>,
    pub latency_p95_ms: Option<f64>,
}

/// Nearest-rank percentile of `samples`; `q` in (0, 1].
pub fn percentile(samples: &[f64], q: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

impl Metrics {
    pub fn session_created(&mut self) {
        self.sessions_created += 1;
    }

    pub fn session_finalized(&mut self, expired: bool) {
        self.sessions_finalized += 1;
        if expired {
            self.sessions_expired += 1;
        }
    }

    pub fn turn(&mut self, latency_ms: f64, component_error: bool) {
        self.turns += 1;
        if component_error {
            self.component_errors += 1;
        }
        if self.latencies.len() == LATENCY_WINDOW {
            self.latencies.pop_front();
        }
        self.latencies.push_back(latency_ms);
    }

    pub fn log_failure(&mut self) {
        self.log_failures += 1;
    }

    pub fn snapshot(&self) -> MetricsSnapshot {
        let samples: Vec<f64> = self.latencies.iter().copied().collect();
        MetricsSnapshot {
            sessions_active: self
                .sessions_created
                .saturating_sub(self.sessions_finalized),
            sessions_created: self.sessions_created,
            sessions_finalized: self.sessions_finalized,
            sessions_expired: self.sessions_expired,
            turns: self.turns,
            component_errors: self.component_errors,
            log_failures: self.log_failures,
            latency_p50_ms: percentile(&samples, 0.5),
            latency_p95_ms: percentile(&samples, 0.95),
        }
    }
}
