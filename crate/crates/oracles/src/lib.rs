//! Reference option prices computed without any RBF-FD machinery:
//!
//! * closed-form Black–Scholes prices,
//! * two-asset arithmetic basket calls by conditioning on one Gaussian factor
//!   (inner Black formula, outer Gauss–Hermite quadrature),
//! * Heston calls from the characteristic function,
//! * American basket puts by projected SOR on a finite-difference grid.
//!
//! Every reference value is computed at two resolutions; disagreement beyond
//! the stated tolerance is an error.

mod american;
mod basket;
mod black;
mod hermite;
mod heston;
mod quadrature;
mod table;

pub use american::{american_put_reference, AmericanGridOptions, AmericanPutSolution};
pub use basket::{basket_call_reference, basket_put_reference, BasketMarket};
pub use black::{bs_call_1d, bs_put_1d, norm_cdf};
pub use hermite::gauss_hermite;
pub use heston::{heston_call_reference, heston_put_reference, HestonMarket};
pub use quadrature::{integrate_adaptive, QuadratureReport};
pub use table::{reference_table_csv, ReferencePrice};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The two resolutions disagree.
    #[error("{method}: resolutions disagree ({coarse} vs {fine})")]
    NoConvergence {
        method: &'static str,
        coarse: f64,
        fine: f64,
    },
    #[error("PSOR stagnated at step {step} after {iterations} sweeps (update {update:e})")]
    Stagnation {
        step: usize,
        iterations: usize,
        update: f64,
    },
}

pub type Result<T> = std::result::Result<T, OracleError>;
