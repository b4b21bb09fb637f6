//! Numerical certification of the protocol's guarantees.
//!
//! - security: the eavesdropper's pad-averaged state is independent of the
//!   parties' sets (trace distance zero);
//! - privacy: the leader's posterior on any membership bit equals the
//!   posterior given only the per-element sum;
//! - correctness: exhaustive runs measure the sum with certainty;
//! - Byzantine behaviour: which deviations the Fourier measurement catches.

mod byzantine;
mod correctness;
mod engines;
mod entropy;
mod grid;
mod privacy;
mod security;

pub use byzantine::{
    byzantine_experiment, haar_unitary, shift_operator, ByzantineReport, ByzantineSpec, TamperMode,
};
pub use correctness::{
    verify_correctness_exhaustive, CorrectnessFailure, CorrectnessReport, MAX_CORRECTNESS_BITS,
    ORACLE_TOLERANCE,
};
pub use engines::{engine_equivalence, fourier_orthonormality_error};
pub use entropy::{verify_entropy_checks, EntropyReport, ENTROPY_TOLERANCE};
pub use grid::{render_table, run_verification_grid, GridBounds, VerificationRow};
pub use privacy::{verify_privacy, PriorModel, PrivacyCheck, PrivacyQuery, MAX_PRIVACY_BITS};
pub use security::{
    eavesdropper_state, verify_security, PadAveraging, SecurityReport, MAX_PAD_COMBINATIONS,
};
