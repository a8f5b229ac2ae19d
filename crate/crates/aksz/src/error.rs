use thiserror::Error;

/// Errors from the algebraic core and the geometric layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square: {rows} rows, row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("cannot combine matrix and non-matrix scalars")]
    MixedKinds,
    #[error("polynomials live over different graded spaces")]
    SpaceMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("variable `{0}` has no assigned value")]
    Unassigned(String),
    #[error("odd variable `{0}` cannot be evaluated numerically")]
    OddVariable(String),
    #[error("differential `{0}` cannot be evaluated numerically")]
    Differential(String),
    #[error("degenerate symplectic form")]
    DegenerateForm,
    #[error("symplectic form is not constant: {0}")]
    NonConstantForm(String),
    #[error("symplectic matrix entry ({0},{1}) violates degree {2}")]
    FormDegree(String, String, i32),
    #[error("symplectic matrix is not graded antisymmetric at ({0},{1})")]
    FormSymmetry(String, String),
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("vector field component for `{coord}` has degree {found}, expected {expected}")]
    FieldDegree { coord: String, found: String, expected: i32 },
    #[error("not a shifted cotangent space: {0}")]
    NotCotangent(String),
    #[error("degenerate gauge fixing: {0}")]
    DegenerateGaugeFixing(String),
    #[error("exponent has no finite expansion: {0}")]
    NotExpandable(String),
    #[error("{0}")]
    Invalid(String),
}
