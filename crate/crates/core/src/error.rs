use thiserror::Error;

/// Error type shared by all modules.
///
/// Variants are grouped by the kind of violation so the CLI can map them to
/// exit codes: parse/usage problems, precondition violations, and numerical
/// failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not an automorphism: |det| = {0}, expected 1")]
    NotAutomorphism(String),

    #[error("polynomial is not squarefree: repeated factor {0}")]
    NotSquarefree(String),

    #[error("perturbation too large for class {0}")]
    PerturbationTooLarge(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

impl Error {
    /// CLI exit code bucket: 1 usage/parse, 2 precondition, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Dimension(_) => 1,
            Error::Precondition(_)
            | Error::NotAutomorphism(_)
            | Error::NotSquarefree(_)
            | Error::PerturbationTooLarge(_) => 2,
            Error::Numerical(_) | Error::SearchExhausted(_) => 3,
        }
    }
}
