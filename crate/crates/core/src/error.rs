use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error(
        "eigenvalue iteration did not converge for a {order}-point rule with exponents ({a}, {b})"
    )]
    QuadratureConvergence { a: f64, b: f64, order: usize },

    #[error("integrand is not finite at node {index} (x = {node})")]
    NonFiniteIntegrand { index: usize, node: f64 },

    #[error("quadrature did not settle: rule doubling up to {order} nodes still differs by {difference:e}")]
    Accuracy { order: usize, difference: f64 },

    #[error("ill-posed problem: {rule}")]
    IllPosed { rule: String },

    #[error("compatibility violated: |B - A - integral(f)| = {residual:e} exceeds {tolerance:e}")]
    Compatibility { residual: f64, tolerance: f64 },

    #[error(
        "flux series failed the Cauchy test after {terms} terms (last increment {increment:e})"
    )]
    SeriesDivergence { terms: usize, increment: f64 },

    #[error("decay rate undefined: {0}")]
    UndefinedRate(String),

    #[error("weak-form index convention check failed: residual {residual:e} at x = {x}")]
    IndexConvention { residual: f64, x: f64 },

    #[error("boundary condition {family} is not available for the {model} model")]
    IncompatibleBoundary { family: String, model: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
