//! Exact random walks on the `k`-spherical dual of `U(n+1)`.
//!
//! States are integer tuples `m` interlacing a fixed weight `k`. One step of
//! the walk raises some `m_i` (coefficients `a_i^2`) and then lowers some
//! `m_j` (coefficients `b_j^2`). On the hyperplane `P = { s_m = s_k }` the
//! step is a quasi-birth-and-death chain whose block-tridiagonal matrix `M`
//! factors into an upper and a lower bidiagonal stochastic matrix.
//!
//! Modules:
//! - [`state`], [`coeffs`]: the state space and the transition coefficients.
//! - [`blocks`]: the blocks of `M`, `M1`, `M2`, truncated matrices, exact evolution.
//! - [`urn`], [`young`]: two sampling mechanisms for the increase substep.
//! - [`walk`]: substeps, the composed step, Monte Carlo simulation.
//!
//! All probabilities are exact [`Rational`]s; floating point only shows up in
//! Monte Carlo summaries.

pub mod blocks;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod rational;
pub mod sampling;
pub mod state;
pub mod urn;
pub mod walk;
pub mod young;

pub use coeffs::{a_row, a_sq, b_row, b_sq};
pub use error::{Error, Result};
pub use rational::Rational;
pub use state::{
    enumerate_omega, state_from_wr, validate_interlacing, wr_from_state, KWeight, OmegaIndex,
    PCoordinate, StateSignature,
};
