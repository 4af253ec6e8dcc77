use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("unknown cell `{0}`")]
    UnknownCell(String),

    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),

    #[error("not a tree: {0}")]
    NotATree(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// The median set of a triple has two or more points, which cannot happen in a pretree.
    #[error("structural inconsistency: median of ({a}, {b}, {c}) has {size} points")]
    NonSingletonMedian {
        a: String,
        b: String,
        c: String,
        size: usize,
    },

    #[error("median of ({0}, {1}, {2}) is empty")]
    EmptyMedian(String, String, String),

    #[error("base and light point of a shadow must differ (got `{0}` twice)")]
    DegeneratePair(String),

    #[error("size limit exceeded: {what} is {got}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("invalid function family: {0}")]
    InvalidFamily(String),

    #[error("epsilon must be positive")]
    NonPositiveEpsilon,

    #[error("invalid word `{0}`: {1}")]
    InvalidWord(String, String),

    #[error("points belong to different rule trees")]
    MixedTrees,

    #[error("wrong action kind: {0}")]
    WrongActionKind(String),

    #[error("not a cover: {0}")]
    NotACover(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
