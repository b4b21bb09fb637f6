//! Density matrices, partial traces and the distance / entropy measures
//! used by the verifiers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QpmaError, Result};

use super::DenseBlockState;

/// Eigenvalues below this are treated as zero in entropy sums.
const EIGEN_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &DenseBlockState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            matrix: &v * v.adjoint(),
        }
    }

    /// Wraps a matrix after checking it is square, Hermitian and of unit trace.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QpmaError::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let rho = Self { matrix };
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(QpmaError::InvalidProbabilities(tr));
        }
        Ok(rho)
    }

    /// `Σ_j p_j |ψ_j⟩⟨ψ_j|`.
    pub fn mix_ensemble(states: &[(f64, DenseBlockState)]) -> Result<Self> {
        let parts: Vec<(f64, Self)> = states.iter().map(|(p, s)| (*p, Self::pure(s))).collect();
        Self::mixture(&parts)
    }

    /// Convex combination of density matrices of equal dimension.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.is_empty() || parts.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(QpmaError::InvalidProbabilities(total));
        }
        let dim = parts[0].1.dimension();
        let mut acc = DMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dimension() != dim {
                return Err(QpmaError::DimensionMismatch {
                    left: dim,
                    right: rho.dimension(),
                });
            }
            acc += &rho.matrix * Complex64::new(*p, 0.0);
        }
        Ok(Self { matrix: acc })
    }

    /// Reduced state of a pure block on `keep_sites`, with the kept digits
    /// ordered by ascending site index.
    pub fn partial_trace(state: &DenseBlockState, keep_sites: &[usize]) -> Result<Self> {
        if keep_sites.is_empty() {
            return Err(QpmaError::EmptyKeepSet);
        }
        let parties = state.parties();
        let mut keep = keep_sites.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&site) = keep.iter().find(|&&s| s >= parties) {
            return Err(QpmaError::SiteOutOfRange { site, parties });
        }
        let traced: Vec<usize> = (0..parties).filter(|s| !keep.contains(s)).collect();
        let p = state.field().order();
        let kept_dim = p.pow(keep.len() as u32);
        let traced_dim = p.pow(traced.len() as u32);

        // Amplitudes reshaped as (kept index) x (traced index); ρ = M M†.
        let mut reshaped = DMatrix::<Complex64>::zeros(kept_dim, traced_dim);
        for (i, &a) in state.amplitudes().iter().enumerate() {
            let row = keep.iter().fold(0, |acc, &s| acc * p + state.digit(i, s));
            let col = traced.iter().fold(0, |acc, &s| acc * p + state.digit(i, s));
            reshaped[(row, col)] = a;
        }
        Ok(Self {
            matrix: &reshaped * reshaped.adjoint(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_valid(&self) -> bool {
        self.hermiticity_error() < 1e-12
            && (self.trace() - 1.0).abs() < 1e-12
            && self.eigenvalues().first().is_none_or(|&min| min >= -1e-10)
    }

    /// `(1/2) Σ |λ_i(a − b)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(QpmaError::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        let diff = hermitian_part(&(&self.matrix - &other.matrix));
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        -self
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > EIGEN_FLOOR)
            .map(|l| l * l.log2())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &DMatrix<Complex64>) -> f64 {
        (&self.matrix - other)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

// Removes rounding asymmetry before the Hermitian eigensolver sees it.
fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn diag(values: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(values.len(), values.len(), |r, c| {
            Complex64::new(if r == c { values[r] } else { 0.0 }, 0.0)
        })
    }

    #[test]
    fn reduction_of_fourier_states_is_maximally_mixed() {
        for p in [2u64, 3, 5] {
            for m in 0..p as u32 {
                let phi = DenseBlockState::phi(f(p), 3, m).unwrap();
                let rho = DensityMatrix::partial_trace(&phi, &[0]).unwrap();
                let expected = diag(&vec![1.0 / p as f64; p as usize]);
                assert!(rho.max_abs_diff(&expected) < 1e-15);
                assert!((rho.trace() - 1.0).abs() < 1e-12);
                assert!(rho.is_valid());
            }
        }
    }

    #[test]
    fn reduction_of_product_state() {
        let s = DenseBlockState::basis(f(2), &[0, 1]).unwrap();
        let rho0 = DensityMatrix::partial_trace(&s, &[0]).unwrap();
        assert!(rho0.max_abs_diff(&diag(&[1.0, 0.0])) < 1e-15);
        let rho1 = DensityMatrix::partial_trace(&s, &[1]).unwrap();
        assert!(rho1.max_abs_diff(&diag(&[0.0, 1.0])) < 1e-15);
        assert_eq!(DensityMatrix::partial_trace(&s, &[]), Err(QpmaError::EmptyKeepSet));
        assert!(DensityMatrix::partial_trace(&s, &[2]).is_err());
    }

    #[test]
    fn keeping_every_site_gives_the_pure_state() {
        let phi = DenseBlockState::phi(f(3), 2, 1).unwrap();
        let full = DensityMatrix::partial_trace(&phi, &[1, 0]).unwrap();
        assert!(full.max_abs_diff(DensityMatrix::pure(&phi).matrix()) < 1e-15);
    }

    #[test]
    fn ensembles() {
        let field = f(3);
        let phi1 = DenseBlockState::phi(field, 3, 1).unwrap();
        let single = DensityMatrix::mix_ensemble(&[(1.0, phi1.clone())]).unwrap();
        assert_eq!(single, DensityMatrix::pure(&phi1));

        let uniform: Vec<_> = (0..3)
            .map(|m| (1.0 / 3.0, DenseBlockState::phi(field, 3, m).unwrap()))
            .collect();
        let rho = DensityMatrix::mix_ensemble(&uniform).unwrap();
        let mut expected = vec![0.0; 27];
        for k in [0, 13, 26] {
            expected[k] = 1.0 / 3.0;
        }
        assert!(rho.max_abs_diff(&diag(&expected)) < 1e-15);

        let f2 = f(2);
        let bits = [
            (0.5, DenseBlockState::basis(f2, &[0]).unwrap()),
            (0.5, DenseBlockState::basis(f2, &[1]).unwrap()),
        ];
        let half = DensityMatrix::mix_ensemble(&bits).unwrap();
        assert!(half.max_abs_diff(&diag(&[0.5, 0.5])) < 1e-15);

        assert!(matches!(
            DensityMatrix::mix_ensemble(&[(0.7, phi1)]),
            Err(QpmaError::InvalidProbabilities(_))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let f2 = f(2);
        let zero = DensityMatrix::pure(&DenseBlockState::basis(f2, &[0]).unwrap());
        let one = DensityMatrix::pure(&DenseBlockState::basis(f2, &[1]).unwrap());
        assert!(zero.trace_distance(&zero).unwrap().abs() < 1e-15);
        assert!((zero.trace_distance(&one).unwrap() - 1.0).abs() < 1e-14);
        let other = DensityMatrix::pure(&DenseBlockState::psi(f2, 2).unwrap());
        assert!(zero.trace_distance(&other).is_err());
    }

    #[test]
    fn entropies() {
        let field = f(3);
        let phi1 = DenseBlockState::phi(field, 3, 1).unwrap();
        assert!(DensityMatrix::pure(&phi1).von_neumann_entropy().abs() < 1e-10);
        let reduced = DensityMatrix::partial_trace(&phi1, &[2]).unwrap();
        assert!((reduced.von_neumann_entropy() - 3f64.log2()).abs() < 1e-10);
    }
}
