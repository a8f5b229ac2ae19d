//! Exact graded geometry and BV tools for AKSZ observables.

pub mod bv;
pub mod error;
pub mod geometry;
pub mod lie;
pub mod linalg;
pub mod loops;
pub mod poly;
pub mod qstructures;
pub mod scalar;

pub use error::AlgebraError;
pub use geometry::{
    contraction, de_rham, hamiltonian_vf, lie_bracket, lie_derivative, poisson_bracket, schouten, vf_apply, ConstantSymplectic, DiffForm, ShiftedCotangent,
    VectorField,
};
pub use lie::{LieAlgebra, Representation};
pub use poly::{Coeff, Coordinate, Grade, GradedPolynomial, GradedSpace, GradedVariable, MatrixPolynomial, Monomial, Poly, Space, VarId};
pub use scalar::{Gq, QMatrix, Scalar, ScalarMatrix};
