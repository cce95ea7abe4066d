//! First-order effects of light-particle scattering on atomic-clock
//! spectroscopy.
//!
//! The crate covers scattering amplitudes and their partial-wave form
//! ([`scattering`]), Ramsey and Rabi detection probabilities with a
//! collision during the interrogation ([`ramsey`], [`rabi`]), sums over
//! many collisions and Monte Carlo statistics ([`ensemble`]), dark-matter
//! sensitivity limits ([`sensitivity`]) and the `clockscatter` command-line
//! front end ([`cli`]).
//!
//! All quantities are SI. Scattering amplitudes are lengths in metres.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod legendre;
pub mod optimize;
pub mod quadrature;
pub mod rabi;
pub mod ramsey;
pub mod scattering;
pub mod sensitivity;
pub mod units;

pub use error::{Result, ScatterError, Warning};
