//! Quantum phase distributions on a truncated single-mode Fock space.
//!
//! The crate computes the Paul phase distribution (the radial marginal of the
//! Husimi Q function) and the Pegg-Barnett distributions, applies the quantum
//! limited amplifier and attenuator channels in the number basis, and ships
//! the experiments showing that the Pegg-Barnett distribution of a state
//! amplified by `kappa = 1 + s * eps` tends to the Paul distribution when
//! `s -> infinity` is taken before `eps -> 0`.
//!
//! Modules are layered bottom-up:
//!
//! * [`fock`]: states and density matrices with truncation bookkeeping.
//! * [`channels`]: amplifier, attenuator, GKLS generator, duality.
//! * [`phase`]: Husimi Q, Paul and Pegg-Barnett distributions, the large-`s`
//!   amplified Pegg-Barnett kernel.
//! * [`experiments`]: the thermal and coherent examples, the ratio table,
//!   figure data and the property suite.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod phase;
pub mod special;

pub use error::{Error, Result, Warning};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for operators on the truncated space.
pub type CMatrix = nalgebra::DMatrix<C64>;
