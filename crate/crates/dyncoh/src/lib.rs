//! # dyncoh
//!
//! Numerical toolkit for dynamical resource theories of coherence and
//! entanglement on finite-dimensional quantum channels.
//!
//! The crate computes channel resource monotones and checks the identities
//! relating them at desk scale (system dimensions 2–9):
//!
//! - [`matrix`] / [`density`]: dense complex linear algebra, Hermitian
//!   eigendecomposition by cyclic Jacobi rotations, tensor products, partial
//!   traces, von Neumann entropy (bits).
//! - [`channels`]: CPTP maps as Choi operators with constructors (dephasing,
//!   generalized CNOT, replacement, measurement and instrument embeddings,
//!   seeded random channels), composition algebra, and linear membership
//!   tests for the MIO/DIO free sets.
//! - [`statesets`]: incoherent and separable free-state representations.
//! - [`divergences`]: relative entropy and trace distance on states, lifted
//!   to channel divergences with restricted input classes.
//! - [`monotones`]: coherence power, trace-distance distance to MIO,
//!   relative entropy of entanglement, and the CNOT coherence-to-entanglement
//!   conversion bounds, all reported with explicit bound types.
//! - [`io`]: versioned JSON file formats for channels and states.
//!
//! Conventions fixed across the crate: logarithms are base 2 (entropies in
//! bits), trace norms are unnormalized (`‖ρ−σ‖₁ ∈ [0,2]`), composite indices
//! are row-major with subsystem A before B before ancillas, and Choi
//! operators are unnormalized (`tr J = dim_in`) with the input factor first.

pub mod channels;
pub mod density;
pub mod divergences;
pub mod io;
pub mod matrix;
pub mod monotones;
pub mod optim;
pub mod statesets;
pub mod tolerances;

pub use density::{von_neumann_entropy, DensityMatrix};
pub use matrix::{kron, ComplexMatrix, ComplexVector, C64};
pub use tolerances::Tolerances;
