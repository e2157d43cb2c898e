use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),

    #[error("cell `{id}`: clock zone {zone} out of range 0..=3")]
    ClockZone { id: String, zone: i64 },

    #[error("cell `{0}`: role=fixed requires a polarization")]
    MissingPolarization(String),

    #[error("cell `{0}`: polarization is only allowed on fixed cells")]
    UnexpectedPolarization(String),

    #[error("cell `{id}`: {message}")]
    InvalidCell { id: String, message: String },

    #[error("cells `{0}` and `{1}` overlap")]
    Overlap(String, String),

    #[error("layout has driven cells but no input or fixed cell")]
    Undriven,

    #[error("unknown cell `{0}`")]
    UnknownCell(String),

    #[error("unknown built-in layout `{0}`")]
    UnknownLayout(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no drive value for input cell `{0}`")]
    MissingDrive(String),

    #[error("cell `{0}` is neither an input nor a fixed cell and cannot be driven")]
    NotDrivable(String),

    #[error("kink matrix does not belong to this layout (cell `{0}`)")]
    ForeignKinkMatrix(String),

    #[error("bistable relaxation did not converge after {iterations} iterations (worst cell `{cell}`, last change {delta:e})")]
    NonConvergence {
        cell: String,
        iterations: usize,
        delta: f64,
    },

    #[error("coherence integration unstable at t={time:e} s (cell `{cell}`, |lambda|={norm}); reduce the time step")]
    Instability { cell: String, time: f64, norm: f64 },

    #[error("reference grid mismatch: {0}")]
    GridMismatch(String),

    #[error("reference table: {0}")]
    Reference(String),

    #[error("at temperature {temperature} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at gap {gap} nm: {source}")]
    AtGap {
        gap: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cell(id: &str, message: impl Into<String>) -> Self {
        Error::InvalidCell {
            id: id.to_string(),
            message: message.into(),
        }
    }
}
