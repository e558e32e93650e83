use std::io;

/// Errors raised by the force laws, the robot model, calibration and data ingestion.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of a force law.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bad argument to an operation (step sizes, scales, flags).
    #[error("argument error: {0}")]
    Argument(String),

    /// Inconsistent or incomplete model configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Measured data violates an invariant.
    #[error("data error: {0}")]
    Data(String),

    /// A CSV header is missing a required column.
    #[error("schema error: missing column `{column}`")]
    Schema { column: String },

    /// A CSV cell could not be parsed as a number. Rows are 1-based data rows.
    #[error("parse error at row {row}, column `{column}`: {value:?}")]
    Parse { row: usize, column: String, value: String },

    /// Too few independent observations for the number of free parameters.
    #[error("underdetermined: {0}")]
    Underdetermined(String),

    /// The least-squares solver failed to converge from every start.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// The equilibrium residual is not monotone on the bracket.
    #[error("model error: {0}")]
    Model(String),

    /// The equilibrium bracket does not contain a sign change.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// An averaging window contains no usable samples.
    #[error("window error: {0}")]
    Window(String),

    /// Two series that must share timestamps do not.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Marker geometry does not define a direction.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code for the command line front end.
    ///
    /// 1 usage, 2 data or configuration, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Domain(_) => 1,
            Error::NonConvergence(_) | Error::Model(_) | Error::Bracket(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
