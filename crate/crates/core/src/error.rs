use thiserror::Error;

use crate::wgmodes::ModeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mode {mode} is not guided ({detail})")]
    ModeCutoff { mode: ModeId, detail: String },

    #[error("no phase-matching width for {mode} in [{lo} nm, {hi} nm]")]
    NoPhaseMatch { mode: ModeId, lo: f64, hi: f64 },

    #[error("degenerate phase match: index difference {delta_n:e} needs no grating")]
    DegeneratePhaseMatch { delta_n: f64 },

    #[error("matrix of size {size} exceeds the permanent size limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("photon number mismatch: input has {input}, output has {output}")]
    PhotonNumberMismatch { input: usize, output: usize },

    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),

    #[error("element {index} is not unitary (deviation {deviation:e})")]
    NonUnitaryElement { index: usize, deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    FitDiverged { iterations: usize },

    #[error("insufficient data span: {0}")]
    InsufficientSpan(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
