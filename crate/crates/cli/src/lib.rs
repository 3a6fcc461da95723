//! Configuration-driven harness around the `rbffd` solver: node generation,
//! single pricing runs and convergence sweeps with CSV output.

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{
    build_layout, cmd_converge, cmd_nodes, cmd_price, fit_order, records_csv, reference_prices,
    ConvergenceRecord, Sweep, CSV_HEADER,
};
