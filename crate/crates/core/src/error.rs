use alloc::string::String;

use thiserror::Error;

/// Errors raised by the exact computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("assignment has length {got}, polynomial has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },

    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        count: String,
        cap: String,
    },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(String),

    #[error("m = {0} is outside the supported range")]
    UnsupportedM(u32),

    #[error("not an antichain: {0}")]
    NotAntichain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for cap violations, which callers usually report as resource errors.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
