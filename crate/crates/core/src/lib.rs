//! Primal-dual Frank-Wolfe for constrained stochastic programs.
//!
//! Every slot the controller observes an i.i.d. state, picks a decision from
//! the state's decision set by minimizing a linearization of the objective
//! plus a virtual-queue penalty, and folds the decision into a running
//! average. The crate is organized as:
//!
//! - [`model`]: domain types, the linear-minimization oracle, the virtual
//!   queue and the single-slot step.
//! - [`algorithms`]: full-horizon runners (primal-dual Frank-Wolfe,
//!   drift-plus-penalty, primal-dual gradient, tracking Frank-Wolfe and the
//!   two-phase scheme).
//! - [`diagnostics`]: a dense simplex LP solver and the oracles built on it
//!   (Frank-Wolfe gap, distance to the achievable-mean polytope, reference
//!   optimum, certificates, bound constants, drift test).
//! - [`problems`]: instance generators and the serializable instance schema.
//! - [`distributed`]: the consensus variant over a connected graph.
//! - [`exec`]: parallel (rayon) or sequential seed sweeps.

pub mod algorithms;
pub mod diagnostics;
pub mod distributed;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod model;
pub mod problems;

pub use error::{Error, Result};
