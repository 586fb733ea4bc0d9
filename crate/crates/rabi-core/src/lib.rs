//! Quantum Rabi model solvers in dimensionless units (H = a^dag a + 1/2 +
//! (Delta/2) sigma_x + g sigma_z (a + a^dag)).
//!
//! Two independent routes to the low spectrum:
//!
//! * [`bo`]: two successive diagonalizations. The two-level sector is
//!   diagonalized at fixed oscillator position ([`model`], closed form), then
//!   the oscillator moves on one adiabatic surface and the dressed problem is
//!   solved in a truncated Fock basis via Gauss-Hermite quadrature
//!   ([`hermite`]) and a dense symmetric eigensolver ([`eig`]).
//! * [`ed`]: exact diagonalization of the full Hamiltonian in the
//!   Fock x spin product basis, the reference the adiabatic scheme is
//!   validated against.
//!
//! [`analysis`] extracts observables from either route: photon populations
//! with even/odd Fock-parity splits, coupling sweeps, and least-squares fits
//! of populations against the Poisson/GUE/GOE closed forms.
//!
//! Everything is deterministic: identical inputs produce identical outputs,
//! including across the internal sweep parallelism.

pub mod analysis;
pub mod bo;
pub mod ed;
pub mod eig;
pub mod error;
pub mod hermite;
pub mod model;
mod simplex;

pub use analysis::{
    classify_population, fit_distribution, population_from_bo, population_from_ed,
    sweep_coupling, BoPopulationMode, Classification, DistributionFit, FitFamily, FitOptions,
    FitSubset, PhotonPopulation, PopulationSource, SolverChoice, SweepPoint,
};
pub use bo::{
    build_bo_matrix, solve_bo, solve_bo_with, wavefunctions_on_grid, BOSpectrum, FockParity,
    WavefunctionGrid,
};
pub use ed::{
    build_ed_matrix, build_ed_matrix_raw, parity_expectation, photon_number_ed, solve_ed,
    EDSpectrum, TotalParity,
};
pub use eig::{eigh, EigenDecomposition, SymmetricMatrix};
pub use error::{Error, Result};
pub use hermite::{
    default_quadrature_order, gauss_hermite_rule, hermite_function, potential_matrix,
    FockBasisSpec, QuadratureRule,
};
pub use model::{
    adiabatic_eigenvector, adiabatic_energy, critical_coupling, effective_potential,
    mixing_angle_gamma, potential_minima, quartic_expansion, Branch, ModelParams,
    QuarticCoefficients,
};

/// Crate version, embedded in CLI artifact metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
