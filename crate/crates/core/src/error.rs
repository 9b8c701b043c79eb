use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex degree n = {0} is too small (need n >= 2)")]
    DegreeTooSmall(usize),

    #[error("rank split m = {m} is degenerate for n = {n} (need 1 <= m <= n-1)")]
    DegenerateRank { n: usize, m: usize },

    #[error("matrix has shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("boundary data has rank(A|B) = {rank}, expected {n}")]
    RankDeficient { n: usize, rank: usize },

    #[error("A B^dagger is not Hermitian (deviation {deviation:.3e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("momentum k = {0} must be positive and finite")]
    InvalidMomentum(f64),

    #[error("linear system is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("need at least {needed} distinct samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("scattering matrix is not free-like")]
    NotFreeLike,

    #[error("{p} of {n} reflection amplitudes are positive; only 0, n or n/2 are possible")]
    InconsistentSplit { n: usize, p: usize },

    #[error("balanced free-like form requires even n, got {0}")]
    BalancedOddDegree(usize),

    #[error("expected {expected} phases, got {got}")]
    PhaseCount { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("canonical form does not reproduce the input (residual {residual:.3e})")]
    ReconstructionMismatch { residual: f64 },

    #[error("scale parameter d = {0} must be positive and finite")]
    InvalidScale(f64),

    #[error("invalid connector: {0}")]
    InvalidConnector(String),

    #[error("invalid delta strengths: {0}")]
    InvalidStrengths(String),

    #[error("invalid d grid: {0}")]
    InvalidGrid(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("only {ok} rows converged; at least {needed} are needed for a fit")]
    InsufficientRows { ok: usize, needed: usize },
}
