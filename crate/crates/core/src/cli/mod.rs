//! Configuration, verification suites and the calibrate and trace commands.

pub mod commands;
pub mod config;
pub mod verify;

pub use commands::{calibrate, trace, write_trace, CalibrationOutput, TraceSummary};
pub use config::{RunConfig, Suite, TEMPLATE};
pub use verify::{run_suite, verify, CheckResult, SuiteReport, VerifyReport};
