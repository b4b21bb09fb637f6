use crate::error::Result;
use crate::field::PrimeField;
use crate::state::{DenseBlockState, DensityMatrix};

pub const ENTROPY_TOLERANCE: f64 = 1e-10;

/// Von Neumann entropies (bits) of three reference states, with the
/// values they must take.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// `S(|φ_1⟩⟨φ_1|)`, expected 0.
    pub pure_fourier: f64,
    /// Uniform mixture of all `φ_m`, expected `log2 P`.
    pub fourier_mixture: f64,
    /// One qudit of `φ_0`, expected `log2 P` (0 for a single-party block).
    pub single_qudit: f64,
    pub expected_mixed: f64,
    pub expected_single_qudit: f64,
}

impl EntropyReport {
    pub fn max_error(&self) -> f64 {
        [
            self.pure_fourier.abs(),
            (self.fourier_mixture - self.expected_mixed).abs(),
            (self.single_qudit - self.expected_single_qudit).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_error() < ENTROPY_TOLERANCE
    }
}

pub fn verify_entropy_checks(field: PrimeField, parties: usize) -> Result<EntropyReport> {
    let p = field.order();
    let phi1 = DenseBlockState::phi(field, parties, 1)?;
    let pure_fourier = DensityMatrix::pure(&phi1).von_neumann_entropy();
    let ensemble = (0..field.modulus())
        .map(|m| Ok((1.0 / p as f64, DenseBlockState::phi(field, parties, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let fourier_mixture = DensityMatrix::mix_ensemble(&ensemble)?.von_neumann_entropy();
    let psi = DenseBlockState::psi(field, parties)?;
    let single_qudit = DensityMatrix::partial_trace(&psi, &[0])?.von_neumann_entropy();
    Ok(EntropyReport {
        pure_fourier,
        fourier_mixture,
        single_qudit,
        expected_mixed: (p as f64).log2(),
        expected_single_qudit: if parties > 1 { (p as f64).log2() } else { 0.0 },
    })
}
