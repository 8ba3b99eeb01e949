use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the physical domain of a formula
    /// (non-positive temperature or frequency, occupation out of range).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Model parameters rejected at construction time.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Temperature or frequency ordering of a cycle specification is violated.
    /// Each entry is the relation that was required, e.g. `"beta_h < beta1"`.
    #[error("ordering violated: {} must hold", .0.join(", "))]
    Ordering(Vec<&'static str>),

    /// An integrand or closed form is singular on the requested domain.
    #[error("singularity: {0}")]
    Singular(String),

    /// The requested stroke would need heat to flow against the bath gradient.
    #[error("heat flow direction inconsistent with stroke: {0}")]
    HeatFlow(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial result {partial:e}, estimated error {error:e})"
    )]
    Convergence { partial: f64, error: f64, subdivisions: usize },

    #[error("{0} is not supported")]
    Unsupported(String),

    /// Wraps an error raised while evaluating one named stroke of a cycle.
    #[error("stroke {stroke}: {source}")]
    Stroke {
        stroke: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stroke(self, stroke: &'static str) -> Self {
        Error::Stroke { stroke, source: Box::new(self) }
    }

    /// Innermost error, looking through stroke wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stroke { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::Convergence { .. })
    }
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}
