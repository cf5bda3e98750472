use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("incompatible azimuthal quantum numbers: bra m={bra}, ket m={ket} for {kind}")]
    IncompatibleM { kind: &'static str, bra: i32, ket: i32 },

    #[error("eigensolver failed to converge ({context})")]
    NoConvergence { context: String },

    #[error("least-squares design matrix is rank deficient (column {column})")]
    RankDeficient { column: usize },

    #[error("unknown molecule `{name}`; available: {available}")]
    UnknownMolecule { name: String, available: String },

    #[error("duplicate molecule name `{0}` in preset registry")]
    DuplicateMolecule(String),

    #[error("malformed preset file: {0}")]
    MalformedPresets(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
