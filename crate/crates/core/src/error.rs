use thiserror::Error;

use crate::game::InfoKey;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A traversal hit a decision point whose information set has no
    /// strategy row in the supplied profile.
    #[error("no strategy registered for information set `{0}`")]
    MissingStrategy(InfoKey),

    /// The queried information set does not occur anywhere in the game.
    #[error("information set `{0}` does not occur in this game")]
    UnknownInfoset(InfoKey),

    /// The information set belongs to chance (or a terminal) rather than
    /// a strategic player.
    #[error("information set `{0}` is not owned by a strategic player")]
    InvalidInfoset(InfoKey),

    /// The game violates its own contract (runaway depth, inconsistent
    /// action counts within one information set, bad chance weights, ...).
    #[error("malformed game: {0}")]
    MalformedGame(String),

    /// A per-action array does not match the information set's action count.
    #[error("action count mismatch at `{key}`: expected {expected}, got {got}")]
    ActionCountMismatch {
        key: InfoKey,
        expected: usize,
        got: usize,
    },

    /// A probability row is not a valid distribution.
    #[error("invalid probability row at `{key}`: {reason}")]
    InvalidDistribution { key: InfoKey, reason: String },

    /// Distribution parameters outside their domain.
    #[error("invalid distribution parameters: {0}")]
    InvalidModel(String),

    /// A textual model spec that does not parse.
    #[error("bad model spec `{spec}`: {reason}")]
    ModelSpec { spec: String, reason: String },

    /// The number of payoff models does not match the game's declared
    /// uncertain-symbol count.
    #[error("game declares {expected} uncertain payoff symbols but {got} were supplied")]
    ModelCount { expected: usize, got: usize },

    /// A routing network that fails validation.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// Trace rows must be appended with strictly increasing iterations.
    #[error("trace iterations must be strictly increasing: got {next} after {prev}")]
    NonMonotoneTrace { prev: u64, next: u64 },

    /// Catch-all for caller errors (zero iterations, chance responder, ...).
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
