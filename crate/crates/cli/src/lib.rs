//! Command-line front end for `tariffcast`: CSV ingestion, the forecast,
//! tournament, validate and compare-windows workflows, and report output.

pub mod dataset;
pub mod report;
pub mod run;
