//! Synthetic workloads, scenario runner and the memory-wall calculator.

pub mod config;
pub mod generate;
pub mod memwall;
pub mod report;
pub mod scenario;
pub mod stats;

pub use config::{ScenarioConfig, ScenarioKind};
pub use generate::{generate_dataset, generate_queries, uniform_queries, DatasetSpec, Distribution};
pub use memwall::{memory_wall, MemoryEstimate, DEFAULT_BUDGET_BYTES};
pub use scenario::{run_scenario, ScenarioReport, ScenarioResults};
pub use stats::LatencyStats;
