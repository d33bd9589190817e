use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A failed identity inside a multi-step construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub step: String,
    pub identity: String,
    /// Index of the first violated equation within the step, if known.
    pub equation: Option<usize>,
    /// The offending diagram in the text format.
    pub diagram: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.step, self.identity)?;
        if let Some(i) = self.equation {
            write!(f, " (equation {i})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 65536")]
    InvalidPrime(u32),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),

    #[error("not a morphism: square {0} does not commute")]
    NotMorphism(usize),

    #[error("sequence is not exact at position {position}, degree {degree}")]
    NotExact { position: usize, degree: i64 },

    #[error("linear system has no solution: {0}")]
    NoSolution(String),

    #[error("verification failed at {0}")]
    Verification(Box<Failure>),

    #[error("search budget of {0} candidates exhausted")]
    BudgetExceeded(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn verification(
        step: &str,
        identity: &str,
        equation: Option<usize>,
        diagram: String,
    ) -> Self {
        Error::Verification(Box::new(Failure {
            step: step.to_string(),
            identity: identity.to_string(),
            equation,
            diagram,
        }))
    }
}
