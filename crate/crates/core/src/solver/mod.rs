//! Time stepping of `du/dτ = L u` with constant-`β₀` BDF2, Dirichlet rows,
//! ILU(0)-preconditioned GMRES, operator splitting for early exercise,
//! evaluation at requested points and conditioning estimates.

mod condition;
mod interp;
mod pricing;
mod time_grid;

pub use condition::condition_estimate;
pub use interp::evaluate_at;
pub use pricing::{
    discretize, linear_solve, price, price_american, price_european, solution_text, solver_log_csv,
    step_matrix, Discretization, LcpStats, PricingOptions, PricingResult, StepLog, Timings,
};
pub use time_grid::{build_time_grid, TimeGrid};

#[cfg(test)]
mod tests;
