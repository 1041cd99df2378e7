//! Gravimetry with mechanical qubits and mechanical cat qubits.
//!
//! A levitated particle's centre-of-mass mode with a Duffing nonlinearity
//! forms a two-level sensor (the mechanical qubit, MQ); adding a resonant
//! two-phonon drive yields a cat-state qubit (MCQ). Gravity enters as a
//! linear force on the mode and is read out through Rabi flips of the qubit.
//!
//! Crate layout:
//!
//! * [`qcore`]: truncated Fock-space linear algebra, states and Wigner maps.
//! * [`model`]: parameter sets, Hamiltonians, cat basis and qubit frames.
//! * [`dynamics`]: closed-form evolutions and the adaptive Lindblad integrator.
//! * [`metrology`]: quantum Fisher information and Rabi-measurement sensitivity.
//! * [`environment`]: gas and blackbody damping, thermal occupation.
//! * [`baselines`]: spin-assisted reference sensitivities.
//! * [`config`], [`experiments`]: configuration files, figure and table data.
//!
//! Units are SI throughout. Hamiltonian matrices are stored as `H/ħ`, i.e.
//! in angular frequency (rad/s), so an energy `ħω` appears as `ω`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod environment;
mod error;
pub mod experiments;
pub mod metrology;
pub mod model;
pub mod qcore;

pub use error::{Error, Result};

/// Complex scalar used for every operator and state.
pub type C64 = num_complex::Complex64;
