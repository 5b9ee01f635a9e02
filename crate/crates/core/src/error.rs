use thiserror::Error;

/// Errors raised by the exact engine and the catalog pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operands live in different quadratic extensions (sqrt({0}) vs sqrt({1}))")]
    MixedExtensions(String, String),

    #[error("square root of an element that already lies in a quadratic extension")]
    ExtensionTower,

    #[error("denominator has a factor not explained by the supplied poles: {0}")]
    UnexplainedFactor(String),

    #[error("expected a monic operator of order 2, got order {order}")]
    NotMonicOrder2 { order: usize },

    #[error("operators do not semi-commute: commutator has order {order}")]
    NotSemiCommuting { order: usize },

    #[error("antiderivative is not rational (nonzero logarithmic part {0})")]
    LogarithmicTerm(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("irregular singular point at {0}")]
    IrregularSingular(String),

    #[error("resonant exponent: indicial polynomial vanishes at rho + {index} with nonzero right-hand side")]
    Resonance { index: usize },

    #[error("radius {radius} is not inside the convergence disc (nearest singularity at distance {distance})")]
    RadiusTooLarge { radius: f64, distance: f64 },

    #[error("evaluation at a pole or branch point: {0}")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown case id {0}")]
    UnknownCase(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
