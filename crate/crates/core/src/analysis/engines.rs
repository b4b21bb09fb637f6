use rand::Rng;
use num_complex::Complex64;

use crate::error::Result;
use crate::field::PrimeField;
use crate::rng::{stream_rng, Stream};
use crate::state::{DenseBlockState, PhaseBlockState};

/// `max_{m,n} |⟨φ_m|φ_n⟩ − δ_{mn}|` on the dense engine.
pub fn fourier_orthonormality_error(field: PrimeField, parties: usize) -> Result<f64> {
    let states = (0..field.modulus())
        .map(|m| DenseBlockState::phi(field, parties, m))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (m, a) in states.iter().enumerate() {
        for (n, b) in states.iter().enumerate() {
            let delta = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b)? - Complex64::new(delta, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Largest amplitude gap between the structured and dense engines over
/// `sequences` random runs of up to `max_steps` clock applications each,
/// starting from `ψ`. Also checks the dense norm stays 1.
pub fn engine_equivalence(
    field: PrimeField,
    parties: usize,
    sequences: usize,
    max_steps: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = stream_rng(seed, Stream::Trial(parties as u64 * 1000 + field.order() as u64));
    let mut worst: f64 = 0.0;
    for _ in 0..sequences {
        let mut structured = PhaseBlockState::psi(field, parties);
        let mut dense = DenseBlockState::psi(field, parties)?;
        let steps = rng.random_range(1..=max_steps.max(1));
        for _ in 0..steps {
            let site = rng.random_range(0..parties);
            let power = rng.random_range(0..field.modulus());
            structured = structured.apply(site, power)?;
            dense = dense.clock_apply(site, power)?;
        }
        worst = worst.max(structured.to_dense()?.max_abs_diff(&dense)?);
        worst = worst.max((dense.norm_sqr() - 1.0).abs());
    }
    Ok(worst)
}
