use thiserror::Error;

/// Errors produced by the decomposition library and its CLI.
#[derive(Debug, Error)]
pub enum WaxError {
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular value decomposition did not converge")]
    SvdNotConverged,

    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    NumericallySingular { condition: f64 },

    #[error("infeasible dimensions: M={m}, K={k}, L={l}, T={t} violates T > max(M(K-L)/K, K-1)")]
    Infeasible {
        m: usize,
        k: usize,
        l: usize,
        t: usize,
    },

    #[error("no nontrivial solution: the null space of B is empty")]
    NoNontrivialSolution,

    #[error("singular W-inverse: every candidate produced a block with condition estimate {condition:.3e} after {attempts} attempts")]
    SingularWInverse { condition: f64, attempts: usize },

    #[error("decomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("construction failed validation after {attempts} attempts")]
    ConstructionFailed { attempts: usize },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<WaxError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl WaxError {
    pub(crate) fn mismatch(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        WaxError::DimensionMismatch {
            op,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }

    /// Strips any `Trial` wrappers.
    pub fn root(&self) -> &WaxError {
        match self {
            WaxError::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<serde_json::Error> for WaxError {
    fn from(e: serde_json::Error) -> Self {
        WaxError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, WaxError>;
