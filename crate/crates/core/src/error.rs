use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("crossing {0}: both occurrences have the same passage")]
    DuplicatePassage(u32),

    #[error("crossing {0}: sign mismatch between its two occurrences")]
    SignMismatch(u32),

    #[error("crossing {id} occurs {count} time(s), expected exactly 2")]
    OccurrenceCount { id: u32, count: usize },

    #[error("crossing ids must be positive")]
    ZeroCrossingId,

    #[error("a crossingless circle marker must be the only token of its component")]
    MixedCircleMarker,

    #[error("the code has no components")]
    Empty,

    #[error("{what}: {n} crossings exceeds the guard of {limit} (override with --force)")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("operation requires a knot diagram (one component), got {0} components")]
    NotAKnot(usize),

    #[error("splice site (component {component}, arc {arc}) is out of range")]
    BadSpliceSite { component: usize, arc: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "the diagram is split (its graph is disconnected); certificates assume non-split links"
    )]
    Split,

    #[error("the Kauffman bracket is zero, so its span is absent")]
    ZeroBracket,

    #[error("diagram is not good: A-state self-touch at {a_violations:?}, B-state self-touch at {b_violations:?}")]
    NotGood {
        a_violations: Vec<u32>,
        b_violations: Vec<u32>,
    },

    #[error("the atom is not orientable")]
    NonOrientableAtom,

    #[error("requires a classical knot diagram: {0}")]
    NotClassicalKnot(String),

    #[error("certificate verification failed: {0}")]
    Verification(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
