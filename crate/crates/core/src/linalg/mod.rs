//! Dense and sparse linear algebra used by the weight solves and the time
//! stepper.

mod condest;
mod dense;
mod gmres;
mod ilu;
mod sparse;

pub use condest::{condition_estimate_1, inverse_norm1_estimate, InverseAction};
pub use dense::{DenseLu, DenseMatrix};
pub use gmres::{gmres, GmresOptions, GmresReport};
pub use ilu::Ilu0;
pub use sparse::{CsrMatrix, Triplet};
