use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ledger parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A ledger entry that parsed but violates a schema rule or invariant.
    /// `field` locates the entry, e.g. `facts[3].value`.
    #[error("invalid ledger entry {field} ({subject}): {message}")]
    InvalidEntry {
        field: String,
        subject: String,
        message: String,
    },

    #[error("invalid Seifert matrix: {0}")]
    InvalidSeifert(String),

    #[error("expression syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("root index j={j} out of range 1..={max} for q={q}")]
    RootIndex { q: u32, j: u32, max: u32 },

    #[error("degenerate Hermitian form at q={q}, j={j}: omega is a root of the Alexander polynomial")]
    DegenerateForm { q: u32, j: u32 },

    #[error("inconsistent cover data: {0}")]
    InconsistentCover(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("no such surface under hypotheses: {0}")]
    NoSuchSurface(String),

    #[error("inconsistent (δ_j, σ) pair: {0}")]
    InconsistentDelta(String),

    #[error("invalid delta sequence: {0}")]
    InvalidSequence(String),

    #[error("sequence never vanishes (stable value {0})")]
    NeverVanishes(i64),

    #[error("threshold unreachable: stable value {stable} exceeds m - σ/2 = {threshold}")]
    ThresholdUnreachable { stable: i64, threshold: i64 },

    #[error("relation inconsistent with signatures: {0}")]
    RelationInconsistent(String),

    #[error("ledger inconsistent for {node}: lower bound {lower} ({lower_rule}) exceeds upper bound {upper} ({upper_rule})")]
    LedgerInconsistent {
        node: String,
        lower: String,
        lower_rule: String,
        upper: String,
        upper_rule: String,
    },

    #[error("hypotheses not met: {0}")]
    Hypotheses(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
