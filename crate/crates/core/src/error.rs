use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// The CLI maps these onto exit codes: parameter and domain problems are
/// validation failures (2); accuracy and boundary-zero failures are accuracy
/// failures (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside domain: {0}")]
    Domain(String),

    /// A numerical target could not be certified. `best_estimate` carries the
    /// last value computed, as `[re, im]`, when one exists.
    #[error("accuracy target not met: {message}")]
    Accuracy {
        message: String,
        best_estimate: Option<[f64; 2]>,
    },

    /// A contour passes through (or numerically indistinguishably close to) a
    /// zero of the function being counted.
    #[error("zero on or near the contour: {0}")]
    BoundaryZero(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn accuracy(message: impl Into<String>, best: Option<[f64; 2]>) -> Self {
        Error::Accuracy {
            message: message.into(),
            best_estimate: best,
        }
    }

    /// Stable short identifier used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::BoundaryZero(_) => "boundary_zero",
            Error::Parse(_) | Error::Json(_) => "parse",
            Error::Csv(_) | Error::Io(_) => "io",
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Domain(_) | Error::Parse(_) | Error::Json(_)
        )
    }

    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::Accuracy { .. } | Error::BoundaryZero(_))
    }
}
