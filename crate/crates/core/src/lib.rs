//! Classical simulation of quantum private membership aggregation.
//!
//! N parties share one GHZ-type block `(1/√P) Σ_k |k…k⟩` per element of a
//! universal set. Each party applies the clock operator `Z^{(U_i + E_i)_l}`
//! to its qudit of block `l`, where `E_i` is its incidence vector and `U_i`
//! a one-time pad shared with the leader. The leader strips the pads and
//! measures every block in the Fourier basis `{φ_m}`, reading off how many
//! parties hold each element (mod P).
//!
//! Modules:
//! - [`field`]: arithmetic in Z_P and roots of unity.
//! - [`state`]: dense and structured block engines, density matrices, the block PVM.
//! - [`protocol`]: scenarios, encoding, transmission, decoding, reports.
//! - [`analysis`]: numerical certification of security, privacy, correctness
//!   and Byzantine behaviour.
//! - [`cli`]: scenario files and command-line entry points.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod field;
pub mod protocol;
pub mod rng;
pub mod state;

pub use error::{QpmaError, Result};
pub use field::{smallest_prime_geq, PhaseExponent, PrimeField};
