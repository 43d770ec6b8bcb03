use thiserror::Error;

/// Failures reported by the library.
///
/// `Domain` means a theorem hypothesis or a parameter window was violated;
/// everything else is a numerical stage that did not succeed.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("hypothesis violated: {0}")]
    Domain(String),

    #[error("pole handling: {0}")]
    Pole(String),

    #[error("no shooting bracket: {0}")]
    NoBracket(String),

    #[error("newton divergence after {} residual evaluations (last residual {last:e})", history.len())]
    Divergence { history: Vec<f64>, last: f64 },

    #[error("positivity lost at node ({i}, {j}) during {stage}")]
    Positivity { i: usize, j: usize, stage: String },

    #[error("singular linear system at row {0}")]
    Singular(usize),

    #[error("exponent fit: {0}")]
    Fit(String),

    #[error("unsupported output: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for hypothesis violations, false for numerical failures.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
