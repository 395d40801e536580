//! Configuration, sample generation and the end-to-end suite.

pub mod bench;
pub mod catalog;
pub mod config;
pub mod fit;
pub mod generate;
pub mod samples;
pub mod suite;
pub mod timing;

pub use config::SuiteConfig;
pub use suite::{run_suite, SuiteReport};
