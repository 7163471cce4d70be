//! Worst-case mean squared error of Monte-Carlo estimators built from
//! possibly dependent random points.
//!
//! For `n` random points `Z_1, …, Z_n`, each with law `μ` on a finite space,
//! the estimator `(1/n) ∑_i f(Z_i)` of `∫f dμ` has mean squared error
//! `MSE_Z(f) = f̄ᵀ Q f̄`, where `f̄ = f − ∫f dμ` and `Q` is the second-order
//! matrix of the design. The worst case over functions of unit L²(μ) norm is
//! `1/n` for independent points; any design on a space that splits into `N`
//! blocks of equal measure has worst case at least
//! `(1/n)(1 − (n−1)/(N−1))`, with equality for sampling without replacement.
//!
//! Modules:
//!
//! * [`space`]: finite probability spaces, functions, equal-measure partitions.
//! * [`design`]: joint laws of the points and their second-order summaries.
//! * [`spectral`]: Jacobi eigendecomposition.
//! * [`analysis`]: exact and worst-case MSE, the bound, and its pigeonhole witness.
//! * [`simulate`]: seeded Monte-Carlo cross-checks.
//! * [`refine`]: designs on `[0, 1]` and partition-refinement sweeps.
//!
//! Point, block and coordinate indices are 0-based throughout the API.

pub mod analysis;
pub mod design;
pub mod error;
pub mod numeric;
pub mod refine;
pub mod simulate;
pub mod space;
pub mod spectral;

pub use analysis::{
    mse_of_function, proof_witness, theorem_bound, theta_matrix, verify_design, worst_case_mse,
    VerificationReport, WitnessReport, WorstCase,
};
pub use design::{Design, DesignKind, SecondOrderMatrix};
pub use error::{Error, Result};
pub use refine::{
    discretize, interval_partition, refinement_sweep, ContinuousDesign, ContinuousKind,
};
pub use simulate::{compare_designs, estimate_mse, SimulationResult};
pub use space::{equal_partition, FiniteSpace, Partition, SpaceFunction};
pub use spectral::{
    jacobi_eigh, max_eigenpair, quadratic_form, EigenDecomposition, SymmetricMatrix,
};
