//! Verification suites, run configuration, reports and binary file formats
//! behind the `opfield` command.

pub mod config;
pub mod formats;
pub mod report;
pub mod suites;
