//! Library side of the `dyncoh` CLI: experiment configuration, verification
//! suites, and report emission. The binary in `main.rs` is a thin wrapper.

pub mod config;
pub mod info;
pub mod suite;

pub use config::{ExperimentConfig, Suite, DIMENSION_CAP};
pub use info::channel_info;
pub use suite::{run_suite, AssertionReport, ChannelRecord, SuiteReport};
