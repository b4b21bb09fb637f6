use num_complex::Complex64;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;

use super::DenseBlockState;

/// A block state restricted to the GHZ subspace:
/// `(1/√P) Σ_k ω^{e_k} |k…k⟩`, stored as the integer exponents `e_k`.
///
/// Clock operators keep honest protocol states inside this subspace, so
/// this is exact and costs `O(P)` regardless of the party count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseBlockState {
    field: PrimeField,
    parties: usize,
    exponents: Vec<u32>,
}

impl PhaseBlockState {
    pub fn psi(field: PrimeField, parties: usize) -> Self {
        Self {
            field,
            parties,
            exponents: vec![0; field.order()],
        }
    }

    pub fn phi(field: PrimeField, parties: usize, m: u32) -> Self {
        let m = field.reduce(m as i64);
        Self {
            field,
            parties,
            exponents: (0..field.modulus()).map(|k| field.mul(m, k)).collect(),
        }
    }

    pub fn from_exponents(field: PrimeField, parties: usize, exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() != field.order() {
            return Err(QpmaError::DimensionMismatch {
                left: field.order(),
                right: exponents.len(),
            });
        }
        if let Some(&bad) = exponents.iter().find(|&&e| e >= field.modulus()) {
            return Err(QpmaError::InputOutOfField {
                value: bad as u64,
                prime: field.modulus(),
            });
        }
        Ok(Self {
            field,
            parties,
            exponents,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `Z^power` at `site`: `e_k ← e_k + power·k`. The site only matters
    /// for the range check, since every qudit of `|k…k⟩` reads `k`.
    pub fn apply(&self, site: usize, power: u32) -> Result<Self> {
        if site >= self.parties {
            return Err(QpmaError::SiteOutOfRange {
                site,
                parties: self.parties,
            });
        }
        let f = self.field;
        let power = f.reduce(power as i64);
        let exponents = self
            .exponents
            .iter()
            .zip(0u32..)
            .map(|(&e, k)| f.add(e, f.mul(power, k)))
            .collect();
        Ok(Self {
            exponents,
            ..self.clone()
        })
    }

    /// `m` such that the state equals `φ_m` up to a global phase, if any.
    pub fn fourier_label(&self) -> Option<u32> {
        let f = self.field;
        let offset = self.exponents[0];
        let slope = if f.modulus() > 1 {
            f.sub(self.exponents[1], offset)
        } else {
            0
        };
        self.exponents
            .iter()
            .zip(0u32..)
            .all(|(&e, k)| e == f.add(offset, f.mul(slope, k)))
            .then_some(slope)
    }

    /// Exact outcome distribution of the Fourier measurement:
    /// `|⟨φ_m|self⟩|² = |(1/P) Σ_k ω^{e_k − mk}|²` for every `m`.
    ///
    /// The Byzantine complement has probability zero for these states.
    pub fn fourier_probabilities(&self) -> Vec<f64> {
        let f = self.field;
        if let Some(label) = self.fourier_label() {
            let mut probs = vec![0.0; f.order()];
            probs[label as usize] = 1.0;
            return probs;
        }
        let table = f.omega_table();
        let p = f.order() as f64;
        (0..f.modulus())
            .map(|m| {
                let amp: Complex64 = self
                    .exponents
                    .iter()
                    .zip(0u32..)
                    .map(|(&e, k)| table[f.sub(e, f.mul(m, k)) as usize])
                    .sum();
                (amp / p).norm_sqr()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Result<DenseBlockState> {
        let dim = super::block_dimension(self.field, self.parties)?;
        let p = self.field.order();
        let scale = 1.0 / (p as f64).sqrt();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for (k, &e) in self.exponents.iter().enumerate() {
            amplitudes[super::ghz_index(p, self.parties, k)] =
                self.field.omega_power(self.field.exponent(e as i64)) * scale;
        }
        DenseBlockState::from_amplitudes(self.field, self.parties, amplitudes)
    }
}
