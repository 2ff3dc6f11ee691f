use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("runtime error at {state}: {msg}")]
    Runtime { state: String, msg: String },

    #[error("empty uniform")]
    EmptyUniform,

    #[error("conditioning on measure-zero event")]
    ZeroDenominator,

    #[error("invalid distribution: {0}")]
    InvalidDist(String),

    #[error("state spaces differ: {0}")]
    SpaceMismatch(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("{0}")]
    Undefined(String),

    #[error("loop visited more than {0} distinct states; raise max_states or bound the loop")]
    LoopStates(usize),

    #[error("catalog: {0}")]
    Catalog(String),
}

impl Error {
    pub(crate) fn runtime(state: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Runtime { state: state.into(), msg: msg.into() }
    }
}
