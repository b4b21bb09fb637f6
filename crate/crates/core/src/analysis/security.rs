//! Eavesdropper view of transmitted qudits.
//!
//! The wiretapper sees the qudits of some non-leader parties while they
//! travel to the leader. Its state for one block is the reduction of the
//! encoded block to those sites, averaged over the pads it does not know.
//! If that state is the same for every incidence assignment, the channel
//! leaks nothing about the assignment.

use std::collections::HashMap;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::protocol::IncidenceVector;
use crate::state::{block_dimension, DenseBlockState, DensityMatrix};

/// Largest number of pad combinations averaged per block.
pub const MAX_PAD_COMBINATIONS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadAveraging {
    /// Uniform average over every pad value of every non-leader party.
    Exact,
    /// All pads zero.
    Unpadded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub max_trace_distance: f64,
    pub comparisons: usize,
}

/// Intercepted state for one block whose incidence column is `column`
/// (one bit per party). The leader encodes with a zero pad.
pub fn eavesdropper_state(
    field: PrimeField,
    leader: usize,
    column: &[u32],
    intercept: &[usize],
    averaging: PadAveraging,
) -> Result<DensityMatrix> {
    let parties = column.len();
    check_intercept(parties, leader, intercept)?;
    block_dimension(field, parties)?;
    let p = field.order();
    let padded: Vec<usize> = (0..parties).filter(|&i| i != leader).collect();
    let combos = match averaging {
        PadAveraging::Exact => p
            .checked_pow(padded.len() as u32)
            .filter(|&c| c <= MAX_PAD_COMBINATIONS)
            .ok_or(QpmaError::EnumerationGuard {
                what: "pad combinations",
                value: usize::MAX,
                limit: MAX_PAD_COMBINATIONS,
            })?,
        PadAveraging::Unpadded => 1,
    };
    let weight = 1.0 / combos as f64;
    let mut parts = Vec::with_capacity(combos);
    for combo in 0..combos {
        let mut pads = vec![0u32; parties];
        let mut rest = combo;
        for &i in &padded {
            pads[i] = (rest % p) as u32;
            rest /= p;
        }
        let mut state = DenseBlockState::psi(field, parties)?;
        for (i, &e) in column.iter().enumerate() {
            state = state.clock_apply(i, field.add(pads[i], field.reduce(e as i64)))?;
        }
        parts.push((weight, DensityMatrix::partial_trace(&state, intercept)?));
    }
    DensityMatrix::mixture(&parts)
}

fn check_intercept(parties: usize, leader: usize, intercept: &[usize]) -> Result<()> {
    if intercept.is_empty() {
        return Err(QpmaError::EmptyKeepSet);
    }
    for &site in intercept {
        if site >= parties {
            return Err(QpmaError::SiteOutOfRange { site, parties });
        }
        if site == leader {
            return Err(QpmaError::scenario(
                "intercept_excludes_leader",
                "the leader's qudits are never transmitted",
            ));
        }
    }
    Ok(())
}

/// Maximum trace distance, over blocks and over pairs of incidence
/// assignments, between the eavesdropper's states.
///
/// Each assignment lists one incidence vector per party.
pub fn verify_security(
    field: PrimeField,
    leader: usize,
    assignments: &[Vec<IncidenceVector>],
    intercept: &[usize],
    averaging: PadAveraging,
) -> Result<SecurityReport> {
    let Some(first) = assignments.first() else {
        return Ok(SecurityReport {
            max_trace_distance: 0.0,
            comparisons: 0,
        });
    };
    let parties = first.len();
    let elements = first.first().map_or(0, IncidenceVector::len);
    if let Some(bad) = assignments
        .iter()
        .find(|a| a.len() != parties || a.iter().any(|e| e.len() != elements))
    {
        return Err(QpmaError::DimensionMismatch {
            left: parties,
            right: bad.len(),
        });
    }

    let mut cache: HashMap<Vec<u32>, DensityMatrix> = HashMap::new();
    let mut max_trace_distance: f64 = 0.0;
    let mut comparisons = 0;
    for l in 0..elements {
        let mut states = Vec::with_capacity(assignments.len());
        for assignment in assignments {
            let column: Vec<u32> = assignment.iter().map(|e| e.get(l)).collect();
            if !cache.contains_key(&column) {
                let rho = eavesdropper_state(field, leader, &column, intercept, averaging)?;
                cache.insert(column.clone(), rho);
            }
            states.push(column);
        }
        states.sort();
        states.dedup();
        for i in 0..states.len() {
            for j in 0..i {
                let d = cache[&states[i]].trace_distance(&cache[&states[j]])?;
                max_trace_distance = max_trace_distance.max(d);
                comparisons += 1;
            }
        }
    }
    Ok(SecurityReport {
        max_trace_distance,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn assignment(rows: &[&[u32]]) -> Vec<IncidenceVector> {
        rows.iter().map(|r| IncidenceVector::from_bits(r.to_vec())).collect()
    }

    #[test]
    fn padded_states_do_not_depend_on_membership() {
        let a = assignment(&[&[1], &[1], &[0]]);
        let b = assignment(&[&[0], &[0], &[1]]);
        for intercept in [vec![0], vec![1], vec![0, 1]] {
            let r = verify_security(f(3), 2, &[a.clone(), b.clone()], &intercept, PadAveraging::Exact)
                .unwrap();
            assert!(r.max_trace_distance < 1e-10);
            assert_eq!(r.comparisons, 1);
        }
    }

    #[test]
    fn single_qudit_without_pads_is_maximally_mixed() {
        let field = f(3);
        for column in [[0, 0, 0], [1, 1, 0], [1, 1, 1]] {
            let rho = eavesdropper_state(field, 2, &column, &[0], PadAveraging::Unpadded).unwrap();
            let eye = nalgebra::DMatrix::identity(3, 3) * num_complex::Complex64::new(1.0 / 3.0, 0.0);
            assert!(rho.max_abs_diff(&eye) < 1e-15);
        }
    }

    #[test]
    fn identical_assignments_have_zero_distance() {
        let a = assignment(&[&[1, 0], &[0, 1]]);
        let r = verify_security(f(2), 0, &[a.clone(), a], &[1], PadAveraging::Exact).unwrap();
        assert_eq!(r.max_trace_distance, 0.0);
    }

    #[test]
    fn intercept_must_avoid_the_leader() {
        assert!(eavesdropper_state(f(3), 0, &[0, 1, 0], &[0], PadAveraging::Exact).is_err());
        assert!(eavesdropper_state(f(3), 0, &[0, 1, 0], &[], PadAveraging::Exact).is_err());
        assert!(eavesdropper_state(f(3), 0, &[0, 1, 0], &[3], PadAveraging::Exact).is_err());
    }
}
