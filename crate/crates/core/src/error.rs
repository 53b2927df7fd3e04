use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive enumeration or search ran out of its budget; the
    /// answer is unknown (not false).
    #[error("resource error: {what} budget of {budget} exhausted")]
    BudgetExceeded { what: &'static str, budget: u64 },

    /// Exhaustive expansion search ran out of budget. `peel_remaining` is the
    /// size of the peeling residue: zero would have certified "no violation".
    #[error("resource error: expansion search budget of {budget} nodes exhausted (peeling residue {peel_remaining} vertices)")]
    ExpansionBudget { budget: u64, peel_remaining: usize },

    /// The cover rate never becomes positive on the scanned bracket, so no
    /// threshold crossing exists there.
    #[error("no sign change for k={k} on [{lo}, {hi}] (max rate {max_rate:e} at d={argmax})")]
    NoSignChange {
        k: u32,
        lo: f64,
        hi: f64,
        max_rate: f64,
        argmax: f64,
    },

    /// The rate is not monotone decreasing after its last positive value.
    #[error("rate not monotone decreasing for k={k} near d={d}")]
    NotMonotone { k: u32, d: f64 },

    /// Malformed text input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable machine-readable category, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::BudgetExceeded { .. } | Error::ExpansionBudget { .. } => "resource",
            Error::NoSignChange { .. } | Error::NotMonotone { .. } => "root_finding",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
