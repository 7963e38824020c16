use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("basis rows are linearly dependent (row {row} has vanishing Gram-Schmidt norm)")]
    DependentRows { row: usize },

    #[error("invalid basis shape: {0}")]
    InvalidShape(String),

    #[error("invalid reduction parameters: {0}")]
    InvalidParams(String),

    #[error("Gram-Schmidt data valid for {valid} rows, {needed} required")]
    InvalidGsoPrefix { needed: usize, valid: usize },

    #[error("insertion indices out of range: k={k}, l={l}, n={n}")]
    IndexOutOfBounds { k: usize, l: usize, n: usize },

    #[error("loop iteration cap of {cap} exceeded")]
    IterationCapExceeded { cap: u64 },

    #[error("{insertions} insertions exceed the potential bound {bound:.3}")]
    InsertionBoundExceeded { insertions: u64, bound: f64 },

    #[error("BKZ did not terminate within {sweeps} sweeps")]
    SweepCapExceeded { sweeps: u64 },

    #[error("machine integer overflow")]
    MachineIntegerOverflow,

    #[error("exact computation is restricted to rank <= {max}, got {n}")]
    ExactModeTooLarge { n: usize, max: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("token longer than {limit} bytes at line {line}, column {column}")]
    OverlongToken { line: usize, column: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;
