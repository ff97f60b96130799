use thiserror::Error;

/// Enumeration bounds for functor searches and other exhaustive constructions.
///
/// The defaults are deliberately small; callers that build large derived
/// groupoids (nerves, weighted limits) pass wider budgets explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_objects: usize,
    pub max_morphisms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_objects: 12,
            max_morphisms: 64,
        }
    }
}

impl Budget {
    pub fn new(max_objects: usize, max_morphisms: usize) -> Self {
        Budget {
            max_objects,
            max_morphisms,
        }
    }

    /// A budget wide enough for the derived groupoids the harness builds.
    pub fn wide() -> Self {
        Budget {
            max_objects: 4096,
            max_morphisms: 1 << 22,
        }
    }

    pub fn admits(&self, n_objects: usize, n_morphisms: usize) -> bool {
        n_objects <= self.max_objects && n_morphisms <= self.max_morphisms
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural isomorphism: {0}")]
    InvalidNatIso(String),
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("maps are not parallel: {0}")]
    NotParallel(String),
    #[error("not an isofibration: {0}")]
    NotIsofibration(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("level out of range: {0}")]
    LevelOutOfRange(String),
    #[error("invalid simplicial set: {0}")]
    InvalidSimplicialSet(String),
    #[error("invalid simplicial map: {0}")]
    InvalidSimplicialMap(String),
    #[error("not Reedy fibrant: {0}")]
    NotReedyFibrant(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unresolved name: {0}")]
    Unresolved(String),
}

pub type Result<T> = std::result::Result<T, Error>;
