//! Efimov trimers of three identical bosons at unitarity in the presence of
//! three-body losses.
//!
//! The crate has two halves that are meant to be checked against each other:
//!
//! * [`efimov`] holds the closed-form results: the channel exponent, the
//!   geometric lossless spectrum, its rigid rotation in the complex plane by
//!   `2 eta* / |s|`, decay rates, sizes and unit conversion.
//! * [`hyperradial`] solves the hyperradial eigenvalue problem with the lossy
//!   short-distance boundary condition directly, once by root-finding a
//!   matching condition built from [`specfun`] and once by ODE shooting that
//!   never touches the special-function code.
//!
//! [`ansatz`] evaluates the full three-body wavefunction and checks the contact
//! condition numerically, and [`verify`] bundles all of the cross-checks into a
//! single report.
//!
//! Everything is expressed in natural units `hbar = m = 1`; lengths are in the
//! same unit as the three-body parameter `r_t` passed in [`ModelParams`].

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod efimov;
mod error;
pub mod exec;
pub mod hyperradial;
pub mod specfun;
pub mod verify;

pub use efimov::{ChannelExponent, ModelParams, TrimerState, UnitSystem};
pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;
