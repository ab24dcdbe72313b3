//! Limiter analysis and TVD MUSCL-type finite volume schemes for 1D scalar
//! conservation laws `u_t + f(u)_x = 0` on periodic grids.

pub mod error;
pub mod experiments;
pub mod flux;
pub mod limiter;
pub mod reconstruction;
pub mod solver;

pub use error::{Error, Result};
pub use flux::{FluxKind, FluxSpec, Interval, NumericalFlux};
pub use limiter::{AdmissibilityReport, Limiter, Predicate, Witness};
pub use reconstruction::{InterfaceValues, Reconstruction};
pub use solver::{CflPolicy, GridState, Monitors, SchemeConfig, StepReport, TimeScheme};

/// Formats a real with 17 significant digits, the precision used in every CSV.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
