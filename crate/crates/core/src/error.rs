use thiserror::Error;

/// Errors produced by the max-plus kernels and checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("value must be a finite real or epsilon, got {0}")]
    NonFiniteValue(f64),

    #[error("epsilon entry where a finite value is required: {0}")]
    EpsilonEntry(String),

    #[error("generator column {0} is all epsilon and generates nothing")]
    DegenerateColumn(usize),

    #[error("Kleene star diverges: maximum cycle mean {lambda} > 0")]
    StarDivergence { lambda: f64 },

    #[error("invalid thresholds: alpha {alpha} > beta {beta}")]
    InvalidThresholds { alpha: f64, beta: f64 },

    #[error("mode index {mode} out of range 1..={n_modes}")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("row {row} of mode {mode} has no finite entry; finite states would not stay finite")]
    RowAllEpsilon { mode: usize, row: usize },

    #[error("automaton state '{0}' is reachable but has no outgoing transition")]
    DeadState(String),

    #[error("trajectory too short: need at least {need} states, got {got}")]
    TrajectoryTooShort { need: usize, got: usize },

    #[error("empty cone: maximum cycle mean {lambda} exceeds the max-plus unit")]
    EmptyCone { lambda: f64 },

    #[error("empty matrix family")]
    EmptyFamily,

    #[error("{0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
