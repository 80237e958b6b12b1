//! Exact perturbation coefficients of radial eigenvalue problems from the
//! Hellmann-Feynman and hypervirial theorems.
//!
//! For a scaled radial Hamiltonian `-d²/dx² + V₀(x) + l(l+1)/x² + g V₁(x)`
//! the eigenvalue is expanded as `ε = Σ_k ε(k) g^k`. The coefficients are
//! obtained from a triangular table of moment coefficients without ever
//! constructing a wavefunction:
//!
//! ```no_run
//! use hypervirial::{energy_series, PotentialFamily, QuantumState};
//!
//! let series = energy_series(PotentialFamily::CORNELL, QuantumState::new(0, 0), 7)?;
//! assert_eq!(series.coefficients()[3], 216);
//! # Ok::<(), hypervirial::EngineError>(())
//! ```
//!
//! Beside the engine the crate carries an independent perturbation-theory
//! oracle ([`rspt`]), large-order and numerical validation tools
//! ([`analysis`]), and the on-disk formats used by the command-line tool
//! ([`document`], [`bench`]).

pub mod analysis;
pub mod bench;
pub mod document;
pub mod error;
pub mod exact;
pub mod moments;
pub mod potential;
pub mod recursion;
pub mod rspt;
pub mod series;

pub use error::{AnalysisError, BenchError, DocumentError, EngineError, ModelError, OracleError};
pub use exact::ExactRational;
pub use moments::{inhomogeneous_term, order0_column, orderk_column, MomentTable};
pub use potential::{
    eps0, physical_to_scaled, PhysicalParams, PotentialFamily, PotentialKind, QuantumState,
    ScaledCoupling,
};
pub use recursion::{recursion_coefficients, RecursionCoefficients};
pub use rspt::{rspt_series, rspt_series_with_limit, WavefunctionAnsatz};
pub use series::{energy_series, EnergySeries};
