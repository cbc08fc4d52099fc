use std::path::PathBuf;

/// Errors produced anywhere in the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("impossible sector: {0}")]
    ImpossibleSector(String),

    #[error("M class undefined for even electron count ({0} electrons)")]
    EvenElectronCount(u32),

    #[error("direction must be a unit vector (|v| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("invalid Slater integral range: {0}")]
    InvalidSlaterRange(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("missing reduction factor for integral family `{0}`")]
    MissingReduction(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("matrix is not Hermitian (max |H - H^T| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("empty M class {0}")]
    EmptyClass(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("k_out is parallel to z; polarization pair undefined")]
    ParallelToZ,

    #[error("core-hole inverse lifetime must be positive (got {0})")]
    NonPositiveGamma(f64),

    #[error("broadening widths must be non-negative and not both zero (lorentz {lorentz}, gauss {gauss})")]
    InvalidBroadening { lorentz: f64, gauss: f64 },

    #[error("no signal at requested point")]
    NoSignal,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("state vector must be normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("preset verification failed: {0}")]
    PresetMismatch(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by user input (config, usage) rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::MissingReduction(_)
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::UnknownPreset(_)
                | Error::InvalidGrid(_)
                | Error::PresetMismatch(_)
                | Error::NonUnitDirection { .. }
                | Error::ParallelToZ
                | Error::InvalidBroadening { .. }
                | Error::NonPositiveGamma(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
