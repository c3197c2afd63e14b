use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP line {line}: {msg}")]
    Fcidump { line: usize, msg: String },

    #[error("amplitude file line {line}: {msg}")]
    Amplitudes { line: usize, msg: String },

    #[error("circuit file line {line}: {msg}")]
    CircuitFormat { line: usize, msg: String },

    #[error("determinants belong to different sectors: ({0}, {1}) vs ({2}, {3})")]
    SectorMismatch(u32, u32, u32, u32),

    #[error("sector dimension {dim} exceeds the configured cap {cap}")]
    SectorTooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty determinant set")]
    EmptySubspace,

    #[error("no input wavefunctions")]
    NoInputs,

    #[error("overlap matrix has numerical rank 0")]
    RankDeficient,

    #[error("Hamiltonian has no non-identity terms")]
    TrivialHamiltonian,

    #[error("orbital energies are required but missing")]
    MissingOrbitalEnergies,

    #[error("vanishing MP2 denominator {0:e}")]
    VanishingDenominator(f64),

    #[error("prefix of length {len} does not fit context length {context}")]
    PrefixTooLong { len: usize, context: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),

    #[error("eigensolver failed to converge: {0}")]
    Eigensolver(String),

    #[error("iteration {iter}: {source}")]
    Iteration {
        iter: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
