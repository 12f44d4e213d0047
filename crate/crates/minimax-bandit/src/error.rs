//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated its domain constraint.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A vector failed a simplex / capped-simplex feasibility check.
    #[error("infeasible input: {0}")]
    Infeasible(String),

    /// Round budget too small for the requested guarantee.
    #[error("round budget T={given} below the admissible minimum {minimum}")]
    InfeasibleHorizon { given: u64, minimum: u64 },

    /// A player failed mid-game; the round index is attached for diagnosis.
    #[error("round {round}: {source}")]
    Round {
        round: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_round(self, round: u64) -> Error {
        Error::Round {
            round,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
