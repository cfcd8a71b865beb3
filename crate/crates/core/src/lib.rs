//! Monte Carlo evaluation of integrated communication, navigation and remote
//! sensing from a single LEO mega-constellation, against separate dedicated
//! shells, for vehicular users.

pub mod config;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod navigation;
pub mod quadrature;
pub mod radar;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod sensing;
pub mod simulator;

pub use config::{fingerprint, parse_config, parse_config_str, to_config_text};
pub use error::{Error, Result};
pub use report::{emit_report, Metric, MetricSummary, MetricsReport, OutputFormat};
pub use rng::RngAlgorithm;
pub use scenario::{IntegrationLevel, ScenarioConfig};
pub use simulator::{run_experiment, run_trial, TrialMetrics};
