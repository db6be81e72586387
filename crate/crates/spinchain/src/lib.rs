//! Dissipative spin-chain simulation: Lindblad steady states, degeneracy
//! analysis, and cold-atom effective parameters.
//!
//! The crate builds dense spin-chain Hamiltonians (XXZ, Ising, Heisenberg
//! with transverse/longitudinal fields), assembles Lindblad superoperators
//! for local, collective, and heating dissipators, and solves for steady
//! states exactly or in the weak-dissipation limit. On top of that it
//! tracks spectral branches across parameter sweeps, locates level
//! crossings, and evaluates the discontinuity condition that decides
//! whether a crossing produces a steady-state peak. A companion module
//! maps lambda-system laser parameters onto the effective spin couplings.
//!
//! Conventions fixed throughout:
//!
//! - Each jump pair `(g, c)` contributes `g (2 c rho c' - {c'c, rho})` to
//!   the master equation (explicit factor 2).
//! - Site 1 occupies the most significant bit of the computational-basis
//!   index; `|0>` is the ground state with `sigma^z` eigenvalue +1.
//! - Density matrices are vectorized column-by-column:
//!   `vec(rho)[i + d*j] = rho[i][j]`.

// Negated float comparisons such as `!(x > 0.0)` are deliberate in
// validation code: unlike `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coldatom;
pub mod config;
pub mod degeneracy;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod models;
pub mod spin_ops;
pub mod steadystate;
pub mod symmetry;

pub use error::{Error, Result};
