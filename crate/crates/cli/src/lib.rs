//! Experiment runner for the `multierg` library.

pub mod commands;
pub mod config;

use multierg::Error;

/// Exit status for validation failures.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for overflow and cost-cap failures.
pub const EXIT_RESOURCE: i32 = 3;
/// Exit status of a suite with failing checks.
pub const EXIT_SUITE_FAILED: i32 = 1;

/// Maps an error to the process exit status.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_resource() => EXIT_RESOURCE,
        _ => EXIT_VALIDATION,
    }
}
