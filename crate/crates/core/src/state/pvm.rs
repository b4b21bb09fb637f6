use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;

use super::{block_dimension, DenseBlockState};

/// Projectors are only materialized as matrices up to this dimension.
pub const MAX_PROJECTOR_DIM: usize = 4096;

/// Label of a block measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PvmOutcome {
    /// The block was found in `φ_m`.
    Fourier(u32),
    /// The block was found outside the GHZ subspace.
    Byzantine,
}

impl fmt::Display for PvmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PvmOutcome::Fourier(m) => write!(f, "{m}"),
            PvmOutcome::Byzantine => f.write_str("BYZANTINE"),
        }
    }
}

/// `{|φ_m⟩⟨φ_m|}_{m ∈ [P]}` together with the complement projector onto
/// the span of every not-all-equal basis string.
///
/// The Fourier states are already an orthonormal basis of the GHZ
/// subspace, so the complement needs no Gram-Schmidt completion.
#[derive(Debug, Clone)]
pub struct BlockPvm {
    field: PrimeField,
    parties: usize,
    fourier: Vec<DenseBlockState>,
}

/// One sampled measurement result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub outcome: PvmOutcome,
    pub probability: f64,
}

impl BlockPvm {
    pub fn new(field: PrimeField, parties: usize) -> Result<Self> {
        block_dimension(field, parties)?;
        let fourier = (0..field.modulus())
            .map(|m| DenseBlockState::phi(field, parties, m))
            .collect::<Result<_>>()?;
        Ok(Self {
            field,
            parties,
            fourier,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dimension(&self) -> usize {
        self.fourier[0].dimension()
    }

    /// Labels in sampling order: `m` ascending, Byzantine last.
    pub fn labels(&self) -> Vec<PvmOutcome> {
        (0..self.field.modulus())
            .map(PvmOutcome::Fourier)
            .chain(std::iter::once(PvmOutcome::Byzantine))
            .collect()
    }

    pub fn complement_rank(&self) -> usize {
        self.dimension() - self.field.order()
    }

    pub fn fourier_state(&self, m: u32) -> &DenseBlockState {
        &self.fourier[m as usize]
    }

    /// Dense projector matrix for `label`.
    pub fn projector(&self, label: PvmOutcome) -> Result<DMatrix<Complex64>> {
        let dim = self.dimension();
        if dim > MAX_PROJECTOR_DIM {
            return Err(QpmaError::DimensionGuard {
                prime: self.field.modulus(),
                parties: self.parties,
                limit: MAX_PROJECTOR_DIM,
            });
        }
        let outer = |s: &DenseBlockState| {
            let v = DVector::from_column_slice(s.amplitudes());
            &v * v.adjoint()
        };
        Ok(match label {
            PvmOutcome::Fourier(m) => outer(&self.fourier[m as usize]),
            PvmOutcome::Byzantine => {
                let mut id = DMatrix::<Complex64>::identity(dim, dim);
                for s in &self.fourier {
                    id -= outer(s);
                }
                id
            }
        })
    }

    /// `⟨ξ|P_i|ξ⟩` for every label, in [`labels`](Self::labels) order.
    pub fn probabilities(&self, state: &DenseBlockState) -> Result<Vec<(PvmOutcome, f64)>> {
        let mut out = Vec::with_capacity(self.fourier.len() + 1);
        for (m, phi) in self.fourier.iter().enumerate() {
            out.push((PvmOutcome::Fourier(m as u32), phi.inner(state)?.norm_sqr()));
        }
        out.push((PvmOutcome::Byzantine, state.off_ghz_weight()));
        Ok(out)
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        state: &DenseBlockState,
        rng: &mut R,
    ) -> Result<Measurement> {
        let probs = self.probabilities(state)?;
        let weights: Vec<f64> = probs.iter().map(|(_, p)| *p).collect();
        let idx = sample_index(&weights, rng.random::<f64>());
        Ok(Measurement {
            outcome: probs[idx].0,
            probability: probs[idx].1,
        })
    }
}

/// Inverse-CDF draw from `weights` with `u ∈ [0, 1)`. Labels with zero
/// weight are never returned, even when rounding leaves the cumulative
/// sum slightly short of 1.
pub fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_nonzero = i;
        cumulative += w;
        if u < cumulative {
            return i;
        }
    }
    last_nonzero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn projector_axioms() {
        for (p, n) in [(2u64, 1usize), (2, 3), (3, 3), (5, 2)] {
            let pvm = BlockPvm::new(f(p), n).unwrap();
            let dim = pvm.dimension();
            let mut total = DMatrix::<Complex64>::zeros(dim, dim);
            for label in pvm.labels() {
                let proj = pvm.projector(label).unwrap();
                let err = (&proj * &proj - &proj).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err < 1e-12, "P={p} N={n} {label}: {err}");
                total += proj;
            }
            let id_err = (total - DMatrix::identity(dim, dim))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(id_err < 1e-12);
        }
    }

    #[test]
    fn complement_ranks() {
        assert_eq!(BlockPvm::new(f(3), 3).unwrap().complement_rank(), 24);
        assert_eq!(BlockPvm::new(f(2), 1).unwrap().complement_rank(), 0);
        // rank equals trace for a projector
        let pvm = BlockPvm::new(f(3), 3).unwrap();
        let tr = pvm.projector(PvmOutcome::Byzantine).unwrap().trace().re;
        assert!((tr - 24.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_outcomes() {
        let field = f(3);
        let pvm = BlockPvm::new(field, 3).unwrap();
        let mut rng = stream_rng(7, Stream::Measurement);
        let phi2 = DenseBlockState::phi(field, 3, 2).unwrap();
        let m = pvm.measure(&phi2, &mut rng).unwrap();
        assert_eq!(m.outcome, PvmOutcome::Fourier(2));
        assert!((m.probability - 1.0).abs() < 1e-12);

        let psi = DenseBlockState::psi(field, 3).unwrap();
        assert_eq!(pvm.measure(&psi, &mut rng).unwrap().outcome, PvmOutcome::Fourier(0));

        let stray = DenseBlockState::basis(field, &[0, 0, 1]).unwrap();
        let m = pvm.measure(&stray, &mut rng).unwrap();
        assert_eq!(m.outcome, PvmOutcome::Byzantine);
        assert_eq!(m.probability, 1.0);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let field = f(3);
        let pvm = BlockPvm::new(field, 2).unwrap();
        let amps: Vec<Complex64> = (0..9).map(|i| Complex64::new(1.0 + i as f64, -(i as f64))).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state =
            DenseBlockState::from_amplitudes(field, 2, amps.iter().map(|a| a / norm).collect()).unwrap();
        let total: f64 = pvm.probabilities(&state).unwrap().iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampling_skips_zero_weights() {
        assert_eq!(sample_index(&[0.0, 1.0 - 1e-16, 0.0], 0.999_999_999_999_999_9), 1);
        assert_eq!(sample_index(&[0.25, 0.25, 0.5], 0.0), 0);
        assert_eq!(sample_index(&[0.25, 0.25, 0.5], 0.3), 1);
        assert_eq!(sample_index(&[0.25, 0.25, 0.5], 0.75), 2);
    }
}
