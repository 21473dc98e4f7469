//! Statevector simulation of collective pairwise sigma-y entangling
//! dynamics.
//!
//! The crate is organized around four layers:
//!
//! - [`state`]: the dense statevector substrate with gate application,
//!   inner products, partial traces, and seeded measurement sampling;
//! - [`gates`]: the pairwise entangler `S_ij`, the full collective unitary
//!   (gate route and exponential route), rotated Pauli bases, GHZ basis
//!   states, and stabilizer verification;
//! - [`analysis`]: GHZ-basis expansions of arbitrary separable states, the
//!   optimal orthogonal-plane projection with its entanglement witness, and
//!   closed-form Bloch-sphere sweeps;
//! - [`secret`]: the N-party secret-sharing protocol built on top, from
//!   encoding through shot-based recovery and two-party collusion analysis.
//!
//! Index convention throughout: qubit `k` owns bit `k` of a basis-state
//! index, and the Pauli convention is `sigma_y = [[0, -i], [i, 0]]`. All
//! operations are pure: states are immutable values and every operation
//! returns a new one.

// Matrix kernels index rows and columns explicitly throughout.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod secret;
pub mod state;

pub use error::{Error, Result};
pub use state::{
    canon_angle, derive_seed, DensityMatrix, QubitAngles, ShotRecord, SingleQubitOp,
    StateVector, TwoQubitOp, MAX_QUBITS,
};
