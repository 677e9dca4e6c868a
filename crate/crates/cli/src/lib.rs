//! Command-line front end: system files, the expression grammar, the
//! analysis pipeline and its reports.

pub mod commands;
pub mod expr;
pub mod pipeline;
pub mod report;
pub mod spec;

pub use commands::{execute, Cli, Command, Run};
pub use pipeline::{run_pipeline, Outcome, PipelineOptions};
pub use spec::{parse_spec, SystemSpec};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Internal errors that fit no other class.
    pub const INTERNAL: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const VERIFICATION: i32 = 5;
    pub const DECOMPOSITION: i32 = 6;
}
