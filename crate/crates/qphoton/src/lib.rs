//! Simulation and estimation toolkit for photonic quantum resources.
//!
//! The crate covers three related problem areas at desk scale:
//!
//! - **[`qumode`]**: measurement statistics of the power-of-one-qumode model —
//!   momentum densities of squeezed probes, normalized-trace estimation,
//!   phase-estimation success probabilities, and integer factoring via order
//!   finding with continued fractions.
//! - **[`states`] / [`fisher`] / [`qfi`]**: multi-parameter SU(2) estimation
//!   with two-mode photon states — Wigner d-matrices, Euler-angle process
//!   parameterization, three-polarization-basis number-counting Fisher
//!   information, maximum-likelihood simulation, and quantum Fisher
//!   information assembled from one- and two-particle reduced states.
//! - **[`thermo`]**: work and entropy-production statistics of a two-mode
//!   squeezing quench of a thermal state, including the Jarzynski/Crooks-type
//!   fluctuation identities and the cosmology/Unruh/black-hole parameter maps.
//!
//! All operations are pure functions of immutable inputs; anything stochastic
//! takes an explicit seed and is reproducible.

pub mod error;
pub mod fisher;
pub mod optim;
pub mod qfi;
pub mod qumode;
pub mod states;
pub mod thermo;

pub use error::{Error, Result};
