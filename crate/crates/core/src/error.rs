use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid category: {}", .0.join("; "))]
    InvalidCategory(Vec<String>),

    #[error("invalid functor: {}", .0.join("; "))]
    InvalidFunctor(Vec<String>),

    #[error("invalid presheaf: {}", .0.join("; "))]
    InvalidPresheaf(Vec<String>),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),

    #[error("morphism `{morphism}` has codomain `{found}`, expected `{expected}`")]
    CodomainMismatch {
        morphism: String,
        expected: String,
        found: String,
    },

    #[error("members of `{0}` are not closed under precomposition")]
    NotASieve(String),

    #[error("sieves live over different objects (`{0}` and `{1}`)")]
    TargetMismatch(String, String),

    #[error("values are defined over different base categories")]
    BaseMismatch,

    #[error("{0} needs a nonempty list")]
    EmptyList(&'static str),

    #[error("enumeration guard exceeded: {what} needs {needed}, bound is {bound}")]
    GuardExceeded {
        what: &'static str,
        needed: usize,
        bound: usize,
    },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("functor is not a fibration: no cartesian lift of `{morphism}` at `{object}`")]
    NotAFibration { object: String, morphism: String },

    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("not a morphism: {0}")]
    NotAMorphism(String),

    #[error("multi-covering is malformed: {0}")]
    MalformedCovering(String),

    #[error("stability witness not found at `{0}`: covering notion is not stable")]
    NotStable(String),

    #[error("element `{element}` is not in the carrier of size {len}")]
    NotInCarrier { element: usize, len: usize },

    #[error("signature error: {0}")]
    Signature(String),

    #[error("ill-sorted formula: {0}")]
    IllSorted(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
