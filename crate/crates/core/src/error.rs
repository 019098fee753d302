use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    PsdViolation { eigenvalue: f64 },

    #[error("unknown subsystem label `{0}`")]
    UnknownSubsystem(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateSubsystem(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("{name} = {value} is outside its legal range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("unknown scenario `{name}` (valid: {valid})")]
    UnknownScenario { name: String, valid: String },

    #[error("trace drifted by {drift:e} at t = {time:e} s")]
    TraceDrift { time: f64, drift: f64 },

    #[error("Bell outcome {outcome} has probability {probability:e}, below the branch cutoff")]
    ZeroProbabilityBranch { outcome: &'static str, probability: f64 },
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
