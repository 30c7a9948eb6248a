use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the verifier and the driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("too few cells: {0} (need at least {min})", min = crate::grid::MIN_CELLS)]
    TooFewCells(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("stencil width {eps} is not an integer multiple of the cell spacing {h}")]
    StencilMisaligned { eps: f64, h: f64 },

    #[error("kernel under-resolved: support radius {radius} is below two cells of width {h}")]
    KernelUnderResolved { radius: f64, h: f64 },

    #[error("field length {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("closure failed in cell {cell}: {source}")]
    Closure {
        cell: usize,
        #[source]
        source: ClosureError,
    },

    #[error("singular volume-fraction coupling in cell {cell}: denominator {denominator:e}")]
    SingularCoupling { cell: usize, denominator: f64 },

    #[error("state violates invariants: {0}")]
    InvalidState(String),

    #[error("rk stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("step failed at t = {time}: {source}")]
    StepFailed {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("snapshot cadence too coarse: gap {gap:e} exceeds {limit:e}")]
    CadenceTooCoarse { gap: f64, limit: f64 },

    #[error("requested time {time} outside trajectory range [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },

    #[error("unknown preset `{name}`; available presets: {}", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },

    #[error("inconsistent primitive state: {0}")]
    InconsistentPrimitive(String),

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Closure { .. }
                | Error::SingularCoupling { .. }
                | Error::InvalidState(_)
                | Error::Stage { .. }
                | Error::StepFailed { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Cell-local failures of the algebraic closure.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClosureError {
    #[error("non-physical internal energy: A1 = {a1:e}, A2 = {a2:e}")]
    NonPhysical { a1: f64, a2: f64 },

    #[error("no admissible pressure root for A1 = {a1:e}, A2 = {a2:e}")]
    NoAdmissibleRoot { a1: f64, a2: f64 },

    #[error("partial density {value:e} below floor {r_min:e}")]
    BelowFloor { value: f64, r_min: f64 },
}

impl ClosureError {
    pub fn at(self, cell: usize) -> Error {
        Error::Closure { cell, source: self }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
