use thiserror::Error;

use crate::grades::Grade;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent user input (bad dimensions, bad indices, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A line-numbered diagnostic from one of the text formats.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("grade dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("homogeneity violated at entry ({row}, {col}): row grade {row_grade} is not <= column grade {col_grade}")]
    Homogeneity {
        row: usize,
        col: usize,
        row_grade: Grade,
        col_grade: Grade,
    },

    /// A mutation was requested that the grade order does not permit.
    #[error("operation not admissible: {0}")]
    NotAdmissible(String),

    #[error("tied grades without perturbation: {}", describe_ties(.rows, .cols))]
    TiedGrades {
        rows: Vec<(usize, usize)>,
        cols: Vec<(usize, usize)>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: {needed} admissible operations > {budget}")]
    Budget { needed: usize, budget: usize },

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

fn describe_ties(rows: &[(usize, usize)], cols: &[(usize, usize)]) -> String {
    let fmt = |pairs: &[(usize, usize)]| {
        pairs
            .iter()
            .map(|(a, b)| format!("{a}={b}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!("rows [{}], columns [{}]", fmt(rows), fmt(cols))
}
