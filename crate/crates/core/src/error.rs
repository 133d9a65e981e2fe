use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("unsupported qubit reduction: {0}")]
    UnsupportedReduction(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("open-shell systems are not supported: {0}")]
    UnsupportedOpenShell(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("degenerate orbitals: {0}")]
    DegenerateOrbitals(String),
    #[error("invalid active space: {0}")]
    InvalidActiveSpace(String),
    #[error("invalid excitation {0}")]
    InvalidExcitation(String),
    #[error("state has zero norm")]
    ZeroState,
    #[error("invalid parameter map: {0}")]
    InvalidParamMap(String),
    #[error("solver failed: {0}")]
    SolverFailed(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("parameter slot {0} is shared by several gates")]
    SharedParameterUnsupported(usize),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("non-finite parameters at step {step}")]
    NumericalBlowup { step: usize },
    #[error("fit error: {0}")]
    FitError(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short variant name, used by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidOperator(_) => "InvalidOperator",
            Error::UnsupportedReduction(_) => "UnsupportedReduction",
            Error::SizeLimit(_) => "SizeLimit",
            Error::Parse { .. } => "ParseError",
            Error::UnsupportedOpenShell(_) => "UnsupportedOpenShell",
            Error::InvalidModel(_) => "InvalidModel",
            Error::DegenerateOrbitals(_) => "DegenerateOrbitals",
            Error::InvalidActiveSpace(_) => "InvalidActiveSpace",
            Error::InvalidExcitation(_) => "InvalidExcitation",
            Error::ZeroState => "ZeroState",
            Error::InvalidParamMap(_) => "InvalidParamMap",
            Error::SolverFailed(_) => "SolverFailed",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidChannel(_) => "InvalidChannel",
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::SharedParameterUnsupported(_) => "SharedParameterUnsupported",
            Error::InvalidSymbol(_) => "InvalidSymbol",
            Error::NumericalBlowup { .. } => "NumericalBlowup",
            Error::FitError(_) => "FitError",
            Error::Io(_) => "IoError",
        }
    }
}
