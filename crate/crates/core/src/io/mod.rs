//! File formats and built-in examples.

pub mod examples;
pub mod pattern_file;
pub mod report;
pub mod trajectory;

pub use pattern_file::{format_pattern, parse_pattern, ParseError, PatternFile};
pub use report::RunReport;
