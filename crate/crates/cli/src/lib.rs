//! Command-line and HTTP front ends over the `localexpert` pipeline.

pub mod commands;
pub mod service;

use localexpert::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Exit code for a pipeline error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownMethod(_) => EXIT_USAGE,
        Error::NotFound { .. }
        | Error::UnknownQuery { .. }
        | Error::InvalidQuery(_)
        | Error::Domain(_)
        | Error::Data(_)
        | Error::Malformed { .. }
        | Error::Invalid(_)
        | Error::Io { .. } => EXIT_DATA,
    }
}
