//! Large-order behaviour of a coefficient series and its numerical
//! validation at small coupling.

mod asymptotic;
mod shooting;
mod truncation;

pub use asymptotic::{
    default_window, fit_gamma_growth, fit_gamma_growth_with_order, ratio_sequence,
    ratio_sequence_with_precision, richardson, AsymptoticFit, FitDiagnostics,
    DEFAULT_RICHARDSON_ORDER,
};
pub use shooting::{count_nodes, direct_eigenvalue, numerov_solution, DirectSolution, SolverSettings};
pub use truncation::{optimal_truncation, TruncationResult, MIN_PRECISION};
