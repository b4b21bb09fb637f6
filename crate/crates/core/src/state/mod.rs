//! Quantum state engines for one N-qudit block.
//!
//! [`DenseBlockState`] keeps all `P^N` amplitudes and serves as the
//! brute-force oracle. [`PhaseBlockState`] tracks only the `P` phase
//! exponents on the `|k…k⟩` strings and drives the protocol itself.

mod dense;
mod density;
mod phase;
mod pvm;

pub use dense::DenseBlockState;
pub use density::DensityMatrix;
pub use phase::PhaseBlockState;
pub use pvm::{sample_index, BlockPvm, Measurement, PvmOutcome, MAX_PROJECTOR_DIM};

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;

/// Largest dense block, in amplitudes.
pub const MAX_DENSE_DIM: usize = 10_000_000;

/// `P^N`, or a guard error when it exceeds [`MAX_DENSE_DIM`].
pub fn block_dimension(field: PrimeField, parties: usize) -> Result<usize> {
    let guard = QpmaError::DimensionGuard {
        prime: field.modulus(),
        parties,
        limit: MAX_DENSE_DIM,
    };
    let exp = u32::try_from(parties).map_err(|_| guard.clone())?;
    match field.order().checked_pow(exp) {
        Some(dim) if dim <= MAX_DENSE_DIM => Ok(dim),
        _ => Err(guard),
    }
}

/// Basis index of `|k…k⟩` (N copies of `k`).
pub(crate) fn ghz_index(p: usize, parties: usize, k: usize) -> usize {
    (0..parties).fold(0, |acc, _| acc * p + k)
}
