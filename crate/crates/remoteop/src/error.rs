use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state norm drifted to {0} (|norm^2 - 1| exceeds tolerance)")]
    NormDrift(f64),

    #[error("forced outcome {value} is impossible (probability {probability:.3e})")]
    ImpossibleOutcome { value: u64, probability: f64 },

    #[error("locality violation: {0}")]
    Locality(String),

    #[error("scenario mismatch: {0}")]
    Scenario(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
