use thiserror::Error;

use crate::algebra::AlgebraDescriptor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch {
        left: AlgebraDescriptor,
        right: AlgebraDescriptor,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// An eigenvalue falls outside the domain of a scalar function. `hypothesis`
    /// names the precondition that failed when the caller knows it.
    #[error("spectrum outside domain of {function}: eigenvalue {eigenvalue:e}{}",
        .hypothesis.as_ref().map(|h| format!(" ({h})")).unwrap_or_default())]
    SpectrumDomain {
        function: String,
        eigenvalue: f64,
        hypothesis: Option<String>,
    },

    /// Quadrature did not reach its tolerance. `estimate` holds the best value
    /// (one entry for scalar integrals, one per coordinate for element-valued ones).
    #[error("quadrature did not converge after {levels} levels (error bound {error_bound:e})")]
    Quadrature {
        estimate: Vec<f64>,
        error_bound: f64,
        levels: usize,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn with_hypothesis(self, text: &str) -> Self {
        match self {
            Error::SpectrumDomain {
                function,
                eigenvalue,
                ..
            } => Error::SpectrumDomain {
                function,
                eigenvalue,
                hypothesis: Some(text.to_string()),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
