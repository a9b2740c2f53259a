use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance rejected: {0}")]
    InstanceRejected(String),

    #[error("N = {0} is even")]
    EvenModulus(String),

    #[error("N = {0} is (probably) prime")]
    PrimeModulus(String),

    #[error("N = {0} is a power of the single prime {1}")]
    PrimePower(String, String),

    #[error("diagonal override {0:?} is not a permutation of the required multiset {1:?}")]
    InvalidOverride(Vec<i64>, Vec<i64>),

    #[error("basis columns are linearly dependent (column {0})")]
    RankDeficient(usize),

    #[error("reduction exceeded the iteration cap of {0}")]
    IterationCapExceeded(u64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not in the lattice: {0}")]
    NotALatticeVector(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("oracle search space of {0} points is too large")]
    OracleTooLarge(u128),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("stage `{stage}` failed in round {round}: {source}")]
    Stage {
        stage: &'static str,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str, round: usize) -> Self {
        Error::Stage {
            stage,
            round,
            source: Box::new(self),
        }
    }
}
