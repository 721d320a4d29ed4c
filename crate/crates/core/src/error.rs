use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifies the random stream that produced a matrix sample, so a single
/// failing draw can be replayed without rerunning the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedTag {
    pub base_seed: u64,
    pub stream: u64,
}

impl SeedTag {
    pub const fn new(base_seed: u64, stream: u64) -> Self {
        Self { base_seed, stream }
    }
}

impl fmt::Display for SeedTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed={}/stream={}", self.base_seed, self.stream)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value lies outside the domain of the requested functional.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} needs {requested} entries, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: u128,
        cap: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The sign condition `-lambda (Z - Z_k) <= 0` failed.
    #[error("sign condition violated at point {point} along coordinate {coordinate}: {detail}")]
    SignCondition {
        point: usize,
        coordinate: usize,
        detail: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("eigensolver did not converge ({})", describe(.tag))]
    NonConvergence { tag: Option<SeedTag> },

    #[error("numeric error ({}): {detail}", describe(.tag))]
    Numeric {
        tag: Option<SeedTag>,
        detail: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn describe(tag: &Option<SeedTag>) -> String {
    match tag {
        Some(tag) => tag.to_string(),
        None => "unseeded matrix".into(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
