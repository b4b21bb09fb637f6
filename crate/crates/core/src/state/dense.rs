use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;

use super::{block_dimension, ghz_index};

/// Full `P^N` amplitude vector of one N-qudit block.
///
/// Basis index of the string `(k_0 … k_{N-1})` is its base-P value with
/// `k_0` as the most significant digit, so `|001⟩` has index 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlockState {
    field: PrimeField,
    parties: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseBlockState {
    /// `ψ = (1/√P) Σ_k |k…k⟩`.
    pub fn psi(field: PrimeField, parties: usize) -> Result<Self> {
        Self::phi(field, parties, 0)
    }

    /// `φ_m = (1/√P) Σ_k ω^{mk} |k…k⟩`.
    pub fn phi(field: PrimeField, parties: usize, m: u32) -> Result<Self> {
        let dim = block_dimension(field, parties)?;
        let p = field.order();
        let m = field.reduce(m as i64);
        let scale = 1.0 / (p as f64).sqrt();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..field.modulus() {
            let phase = field.omega_power(field.exponent(field.mul(m, k) as i64));
            amplitudes[ghz_index(p, parties, k as usize)] = phase * scale;
        }
        Ok(Self {
            field,
            parties,
            amplitudes,
        })
    }

    /// Computational basis state `|digits⟩`.
    pub fn basis(field: PrimeField, digits: &[u32]) -> Result<Self> {
        let parties = digits.len();
        let dim = block_dimension(field, parties)?;
        let mut index = 0usize;
        for &d in digits {
            if d >= field.modulus() {
                return Err(QpmaError::InputOutOfField {
                    value: d as u64,
                    prime: field.modulus(),
                });
            }
            index = index * field.order() + d as usize;
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            field,
            parties,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; rejects wrong lengths and unnormalized input.
    pub fn from_amplitudes(
        field: PrimeField,
        parties: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let dim = block_dimension(field, parties)?;
        if amplitudes.len() != dim {
            return Err(QpmaError::DimensionMismatch {
                left: dim,
                right: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QpmaError::NotNormalized(norm));
        }
        Ok(Self {
            field,
            parties,
            amplitudes,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Digit of basis index `index` at `site`.
    pub fn digit(&self, index: usize, site: usize) -> usize {
        let p = self.field.order();
        (index / p.pow((self.parties - 1 - site) as u32)) % p
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.parties {
            return Err(QpmaError::SiteOutOfRange {
                site,
                parties: self.parties,
            });
        }
        Ok(())
    }

    /// Applies the clock operator `Z^power` to one site.
    pub fn clock_apply(&self, site: usize, power: u32) -> Result<Self> {
        self.check_site(site)?;
        let f = self.field;
        let power = f.reduce(power as i64);
        let table = f.omega_table();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let k = self.digit(i, site) as u32;
                a * table[f.mul(power, k) as usize]
            })
            .collect();
        Ok(Self {
            amplitudes,
            ..self.clone()
        })
    }

    /// Applies a `P x P` single-qudit operator to one site.
    pub fn apply_site_operator(&self, site: usize, op: &DMatrix<Complex64>) -> Result<Self> {
        self.check_site(site)?;
        let p = self.field.order();
        if op.nrows() != p || op.ncols() != p {
            return Err(QpmaError::DimensionMismatch {
                left: p,
                right: op.nrows().max(op.ncols()),
            });
        }
        let stride = p.pow((self.parties - 1 - site) as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = self.digit(i, site);
            let base = i - k * stride;
            for row in 0..p {
                let entry = op[(row, k)];
                if entry != Complex64::new(0.0, 0.0) {
                    out[base + row * stride] += entry * a;
                }
            }
        }
        Ok(Self {
            amplitudes: out,
            ..self.clone()
        })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dimension() != other.dimension() {
            return Err(QpmaError::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability weight outside the span of the `|k…k⟩` strings.
    pub fn off_ghz_weight(&self) -> f64 {
        let p = self.field.order();
        let mut ghz = vec![false; self.amplitudes.len()];
        for k in 0..p {
            ghz[ghz_index(p, self.parties, k)] = true;
        }
        self.amplitudes
            .iter()
            .zip(ghz)
            .filter(|(_, on)| !on)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }

    /// Largest amplitude-wise distance to another state.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(QpmaError::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn psi_matches_worked_example() {
        let psi = DenseBlockState::psi(f(3), 3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let expected = if [0, 13, 26].contains(&i) { s } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0);
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qudit_psi_is_uniform() {
        let psi = DenseBlockState::psi(f(2), 1).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(psi.amplitudes(), &[Complex64::new(s, 0.0); 2]);
    }

    #[test]
    fn phi_amplitudes() {
        let field = f(3);
        let w = field.omega_power(field.exponent(1));
        let s = 1.0 / 3f64.sqrt();
        let phi1 = DenseBlockState::phi(field, 3, 1).unwrap();
        assert!((phi1.amplitudes()[13] - w * s).norm() < 1e-15);
        assert!((phi1.amplitudes()[26] - w * w * s).norm() < 1e-15);
        // ω^4 = ω on |222⟩ of φ_2
        let phi2 = DenseBlockState::phi(field, 3, 2).unwrap();
        assert!((phi2.amplitudes()[26] - w * s).norm() < 1e-15);
        assert_eq!(
            DenseBlockState::phi(field, 3, 0).unwrap(),
            DenseBlockState::psi(field, 3).unwrap()
        );
    }

    #[test]
    fn clock_on_psi_gives_phi() {
        let field = f(3);
        let psi = DenseBlockState::psi(field, 3).unwrap();
        let phi1 = DenseBlockState::phi(field, 3, 1).unwrap();
        let z0 = psi.clock_apply(0, 1).unwrap();
        let z2 = psi.clock_apply(2, 1).unwrap();
        assert!(z0.max_abs_diff(&phi1).unwrap() < 1e-15);
        assert!(z0.max_abs_diff(&z2).unwrap() < 1e-15);
        assert_eq!(psi.clock_apply(1, 0).unwrap(), psi);
        assert_eq!(
            psi.clock_apply(3, 1),
            Err(QpmaError::SiteOutOfRange {
                site: 3,
                parties: 3
            })
        );
    }

    #[test]
    fn fourier_states_are_orthonormal() {
        for p in [2u64, 3, 5] {
            for n in 1..=3 {
                let field = f(p);
                let states: Vec<_> = (0..p as u32)
                    .map(|m| DenseBlockState::phi(field, n, m).unwrap())
                    .collect();
                for (m, a) in states.iter().enumerate() {
                    for (k, b) in states.iter().enumerate() {
                        let expected = if m == k { 1.0 } else { 0.0 };
                        let ip = a.inner(b).unwrap();
                        assert!((ip - Complex64::new(expected, 0.0)).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let field = f(3);
        let a = DenseBlockState::phi(field, 2, 1).unwrap();
        let b = DenseBlockState::basis(field, &[1, 1]).unwrap();
        let ab = a.inner(&b).unwrap();
        let ba = b.inner(&a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        let c = DenseBlockState::psi(field, 3).unwrap();
        assert!(a.inner(&c).is_err());
    }

    #[test]
    fn guard_and_validation() {
        assert!(matches!(
            DenseBlockState::psi(f(11), 7),
            Err(QpmaError::DimensionGuard { .. })
        ));
        let bad = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(
            DenseBlockState::from_amplitudes(f(2), 2, bad),
            Err(QpmaError::NotNormalized(_))
        ));
    }

    #[test]
    fn site_operator_matches_clock() {
        let field = f(5);
        let state = DenseBlockState::phi(field, 2, 3).unwrap();
        let z = DMatrix::from_fn(5, 5, |r, c| {
            if r == c {
                field.omega_power(field.exponent(2 * r as i64))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let lhs = state.apply_site_operator(1, &z).unwrap();
        let rhs = state.clock_apply(1, 2).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn off_ghz_weight_of_basis_strings() {
        let field = f(3);
        assert_eq!(DenseBlockState::basis(field, &[0, 0, 1]).unwrap().off_ghz_weight(), 1.0);
        assert_eq!(DenseBlockState::basis(field, &[2, 2, 2]).unwrap().off_ghz_weight(), 0.0);
    }
}
