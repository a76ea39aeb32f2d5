use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("record `{name}` violates an invariant: {reason}")]
    InvariantViolation { name: String, reason: String },

    #[error("no records match the selection ({0})")]
    NoMatch(String),

    #[error("line {line}: conflicting duplicate of record `{name}`")]
    DuplicateRecord { name: String, line: u64 },

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("expected count is zero in cell ({row}, {col})")]
    ZeroExpectedCell { row: String, col: String },

    #[error("pooled sample size is zero")]
    EmptyPool,

    #[error("pooled proportion is {0}; proportions differ but have no variance")]
    DegeneratePool(f64),

    #[error("institution `{0}` has no publications")]
    EmptyInstitution(String),

    #[error("statistic is not a finite number")]
    InvalidStatistic,

    #[error("institution `{0}` has no stability interval")]
    MissingInterval(String),

    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("the two labelings share no institution")]
    NoOverlap,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input is constant; rank correlation is undefined")]
    ConstantInput,

    #[error("cannot read a start year from period label `{0}`")]
    AmbiguousPeriodLabel(String),

    #[error("unknown institution `{0}`")]
    UnknownInstitution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad user input (files, names, flags)
    /// rather than an internal failure.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::InvalidStatistic)
    }
}
