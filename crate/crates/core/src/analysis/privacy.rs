//! Leader's posterior about one party's membership bit.
//!
//! Every incidence configuration is enumerated with its prior weight.
//! The protocol side conditions on the dense-oracle probability of
//! measuring `φ_m` on the chosen block; the reference side conditions on
//! the field sum of that block's column being `m`. Equal posteriors mean
//! the measurement reveals nothing beyond the sum.

use std::collections::HashMap;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::protocol::{dense_block_pipeline, SharedSetup};
use crate::state::{BlockPvm, PvmOutcome};

/// Largest `N·K` enumerated.
pub const MAX_PRIVACY_BITS: usize = 20;

/// Every membership bit is independently 1 with probability `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorModel {
    q: f64,
}

impl PriorModel {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(QpmaError::scenario("q_in_unit_interval", format!("q = {q}")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn weight(&self, bits: u64, count: usize) -> f64 {
        let ones = (bits & ((1u64 << count) - 1)).count_ones() as i32;
        self.q.powi(ones) * (1.0 - self.q).powi(count as i32 - ones)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyQuery {
    pub parties: usize,
    pub elements: usize,
    pub leader: usize,
    pub prior: PriorModel,
    /// Party whose bit is guessed.
    pub party: usize,
    /// Block / element index.
    pub element: usize,
    /// Fourier outcome conditioned on.
    pub outcome: u32,
    pub pad_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrivacyCheck {
    Posteriors { protocol: f64, sum: f64 },
    /// The conditioning event has zero prior probability.
    ZeroProbabilityEvent,
}

impl PrivacyCheck {
    pub fn deviation(&self) -> f64 {
        match self {
            PrivacyCheck::Posteriors { protocol, sum } => (protocol - sum).abs(),
            PrivacyCheck::ZeroProbabilityEvent => 0.0,
        }
    }
}

pub fn verify_privacy(field: PrimeField, query: &PrivacyQuery) -> Result<PrivacyCheck> {
    let PrivacyQuery {
        parties,
        elements,
        leader,
        prior,
        party,
        element,
        outcome,
        pad_seed,
    } = *query;
    let bits = parties * elements;
    if bits > MAX_PRIVACY_BITS {
        return Err(QpmaError::EnumerationGuard {
            what: "N*K",
            value: bits,
            limit: MAX_PRIVACY_BITS,
        });
    }
    if party >= parties || leader >= parties {
        return Err(QpmaError::SiteOutOfRange {
            site: party.max(leader),
            parties,
        });
    }
    if element >= elements {
        return Err(QpmaError::DimensionMismatch {
            left: elements,
            right: element,
        });
    }
    let pvm = BlockPvm::new(field, parties)?;
    let setup = SharedSetup::new(field, parties, elements, leader, pad_seed);
    let pads: Vec<u32> = (0..parties).map(|i| setup.pad_entry(i, element)).collect();
    let target = PvmOutcome::Fourier(field.reduce(outcome as i64));

    // outcome probability depends only on the block's column
    let mut oracle: HashMap<Vec<u32>, f64> = HashMap::new();
    let (mut proto_joint, mut proto_marginal) = (0.0, 0.0);
    let (mut sum_joint, mut sum_marginal) = (0.0, 0.0);
    // bit (i*K + l) of `config` is (E_i)_l
    for config in 0u64..(1u64 << bits) {
        let w = prior.weight(config, bits);
        if w == 0.0 {
            continue;
        }
        let column: Vec<u32> = (0..parties)
            .map(|i| ((config >> (i * elements + element)) & 1) as u32)
            .collect();
        let p_outcome = match oracle.get(&column) {
            Some(&p) => p,
            None => {
                let state = dense_block_pipeline(field, leader, true, &column, &pads, None)?;
                let p = pvm
                    .probabilities(&state)?
                    .into_iter()
                    .find(|(o, _)| *o == target)
                    .map_or(0.0, |(_, p)| p);
                oracle.insert(column.clone(), p);
                p
            }
        };
        let holds = column[party] == 1;
        proto_marginal += w * p_outcome;
        if holds {
            proto_joint += w * p_outcome;
        }
        let sum = column.iter().fold(0, |acc, &b| field.add(acc, b));
        if PvmOutcome::Fourier(sum) == target {
            sum_marginal += w;
            if holds {
                sum_joint += w;
            }
        }
    }
    if sum_marginal == 0.0 {
        return Ok(PrivacyCheck::ZeroProbabilityEvent);
    }
    Ok(PrivacyCheck::Posteriors {
        protocol: proto_joint / proto_marginal,
        sum: sum_joint / sum_marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(parties: usize, outcome: u32, q: f64) -> PrivacyQuery {
        PrivacyQuery {
            parties,
            elements: 1,
            leader: 0,
            prior: PriorModel::new(q).unwrap(),
            party: 1,
            element: 0,
            outcome,
            pad_seed: 17,
        }
    }

    fn posteriors(check: PrivacyCheck) -> (f64, f64) {
        match check {
            PrivacyCheck::Posteriors { protocol, sum } => (protocol, sum),
            PrivacyCheck::ZeroProbabilityEvent => panic!("unexpected zero-probability event"),
        }
    }

    #[test]
    fn one_member_out_of_three() {
        let (p, s) = posteriors(verify_privacy(PrimeField::new(3).unwrap(), &query(3, 1, 0.5)).unwrap());
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        assert!((s - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn extreme_counts_are_forced() {
        let f5 = PrimeField::new(5).unwrap();
        let (p, s) = posteriors(verify_privacy(f5, &query(3, 3, 0.5)).unwrap());
        assert!((p - 1.0).abs() < 1e-12 && (s - 1.0).abs() < 1e-12);
        let (p, s) = posteriors(verify_privacy(f5, &query(3, 0, 0.5)).unwrap());
        assert!(p.abs() < 1e-12 && s.abs() < 1e-12);
    }

    #[test]
    fn impossible_outcomes_are_flagged() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(
            verify_privacy(f5, &query(3, 4, 0.5)).unwrap(),
            PrivacyCheck::ZeroProbabilityEvent
        );
        assert_eq!(
            verify_privacy(f5, &query(3, 1, 0.0)).unwrap(),
            PrivacyCheck::ZeroProbabilityEvent
        );
    }

    #[test]
    fn guards() {
        let f3 = PrimeField::new(3).unwrap();
        let mut q = query(3, 1, 0.5);
        q.elements = 7;
        assert!(matches!(verify_privacy(f3, &q), Err(QpmaError::EnumerationGuard { .. })));
        assert!(PriorModel::new(-0.1).is_err());
    }
}
