use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Nearest-rank latency percentiles over the full sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub p50_us: f64,
    pub p95_us: f64,
    pub p99_us: f64,
    pub mean_us: f64,
    pub qps: f64,
    pub total_queries: u64,
}

/// Value at rank `ceil(p/100 · n)` (1-based) of the sorted sample.
pub fn nearest_rank(sorted: &[Duration], percentile: f64) -> Duration {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl LatencyStats {
    /// `None` for an empty sample.
    pub fn from_samples(mut samples: Vec<Duration>, elapsed: Duration) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_unstable();
        let us = |d: Duration| d.as_secs_f64() * 1e6;
        let total: Duration = samples.iter().sum();
        let n = samples.len() as u64;
        let secs = elapsed.as_secs_f64();
        Some(LatencyStats {
            p50_us: us(nearest_rank(&samples, 50.0)),
            p95_us: us(nearest_rank(&samples, 95.0)),
            p99_us: us(nearest_rank(&samples, 99.0)),
            mean_us: us(total) / n as f64,
            qps: if secs > 0.0 { n as f64 / secs } else { f64::INFINITY },
            total_queries: n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ms(v: u64) -> Duration {
        Duration::from_millis(v)
    }

    #[test]
    fn nearest_rank_examples() {
        let s: Vec<Duration> = (1..=100).map(ms).collect();
        assert_eq!(nearest_rank(&s, 50.0), ms(50));
        assert_eq!(nearest_rank(&s, 95.0), ms(95));
        assert_eq!(nearest_rank(&s, 99.0), ms(99));
        assert_eq!(nearest_rank(&[ms(7)], 99.0), ms(7));
        let five = [ms(15), ms(20), ms(35), ms(40), ms(50)];
        assert_eq!(nearest_rank(&five, 30.0), ms(20));
        assert_eq!(nearest_rank(&five, 100.0), ms(50));
    }

    #[test]
    fn qps_from_elapsed() {
        let st = LatencyStats::from_samples(vec![ms(1); 10], Duration::from_secs(2)).unwrap();
        assert_eq!(st.qps, 5.0);
        assert_eq!(st.total_queries, 10);
        assert!(LatencyStats::from_samples(vec![], Duration::from_secs(1)).is_none());
    }

    proptest! {
        #[test]
        fn percentiles_ordered(raw in proptest::collection::vec(0u64..10_000, 1..400)) {
            let st = LatencyStats::from_samples(
                raw.into_iter().map(Duration::from_micros).collect(),
                Duration::from_secs(1),
            ).unwrap();
            prop_assert!(st.p50_us <= st.p95_us && st.p95_us <= st.p99_us);
        }
    }
}
