//! Polyharmonic spline + polynomial RBF-FD weights and the assembled
//! differentiation matrix.
//!
//! For a stencil `x¹ … xⁿ` around `x_j` the weights `w` solve
//!
//! ```text
//! [ A  Pᵀ ] [ w ]   [ Lφ(‖x_j − xⁱ‖) ]
//! [ P  0  ] [ γ ] = [ L p_k(x_j)     ]
//! ```
//!
//! with `A_ik = φ(‖xⁱ − xᵏ‖)` and `P_ki = p_k(xⁱ)`. The system is formed in
//! stencil-local coordinates (shifted to the centre, divided by the stencil
//! radius) and the operator coefficients are rescaled accordingly.

mod coeffs;
mod phs;
mod poly;
mod weights;

pub use coeffs::OperatorCoeffs;
pub use phs::{phs_operator_apply, phs_value, PhsBasis};
pub use poly::{monomial_operator_apply, PolySpace};
pub use weights::{
    assemble, local_weights, matrix_from_rows, stencil_rows, stencil_weights, SparseOperator,
    WeightOptions, MAX_STENCIL_CONDITION,
};

#[cfg(test)]
mod tests;
