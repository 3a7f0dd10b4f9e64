use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    /// A bracket factor `1 + 2(g_pc - A/G)` reached zero or below, so the
    /// predicted population would turn non-positive.
    #[error("model breakdown at {year}: bracket factor {factor} is not positive")]
    ModelBreakdown { year: i32, factor: f64 },

    #[error("calibration failed: {message}")]
    Calibration { message: String, trace: Vec<String> },

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ModelBreakdown { .. }
                | Error::Calibration { .. }
                | Error::SingularDesign(_)
                | Error::SingularSystem(_)
        )
    }
}
