use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::protocol::{dense_block_pipeline, execute, RunConfig, SharedSetup};
use crate::state::{BlockPvm, PvmOutcome};

/// Largest `N·K` for exhaustive runs.
pub const MAX_CORRECTNESS_BITS: usize = 16;

/// Tolerance on the dense-oracle probability of the expected outcome.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectnessFailure {
    pub configuration: u64,
    pub element: usize,
    pub expected: u32,
    pub observed: PvmOutcome,
    pub oracle_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectnessReport {
    pub configurations: usize,
    pub blocks_checked: usize,
    /// Smallest dense-oracle probability of the expected outcome seen.
    pub min_oracle_probability: f64,
    pub failures: Vec<CorrectnessFailure>,
}

impl CorrectnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the protocol on every incidence configuration of `parties` sets
/// over `elements` elements. Each block must measure the field sum of its
/// column, and the independently evolved dense state must assign that
/// outcome probability `1 ± ORACLE_TOLERANCE`.
pub fn verify_correctness_exhaustive(
    field: PrimeField,
    parties: usize,
    elements: usize,
) -> Result<CorrectnessReport> {
    let bits = parties * elements;
    if bits > MAX_CORRECTNESS_BITS {
        return Err(QpmaError::EnumerationGuard {
            what: "N*K",
            value: bits,
            limit: MAX_CORRECTNESS_BITS,
        });
    }
    let pvm = BlockPvm::new(field, parties)?;
    let leader = 0;
    let mut failures = Vec::new();
    let mut min_oracle_probability: f64 = 1.0;
    for config in 0u64..(1u64 << bits) {
        let inputs: Vec<Vec<u32>> = (0..parties)
            .map(|i| {
                (0..elements)
                    .map(|l| ((config >> (i * elements + l)) & 1) as u32)
                    .collect()
            })
            .collect();
        let run = execute(&RunConfig {
            field,
            leader,
            leader_encodes: true,
            inputs: &inputs,
            master_seed: config,
            byzantine: None,
        })?;
        let setup = SharedSetup::new(field, parties, elements, leader, config);
        for l in 0..elements {
            let column: Vec<u32> = inputs.iter().map(|row| row[l]).collect();
            let expected = column.iter().fold(0, |acc, &b| field.add(acc, b));
            let pads: Vec<u32> = (0..parties).map(|i| setup.pad_entry(i, l)).collect();
            let dense = dense_block_pipeline(field, leader, true, &column, &pads, None)?;
            let oracle_probability = pvm
                .fourier_state(expected)
                .inner(&dense)?
                .norm_sqr();
            min_oracle_probability = min_oracle_probability.min(oracle_probability);
            let observed = run.blocks[l].measurement.outcome;
            if observed != PvmOutcome::Fourier(expected)
                || (oracle_probability - 1.0).abs() > ORACLE_TOLERANCE
            {
                failures.push(CorrectnessFailure {
                    configuration: config,
                    element: l,
                    expected,
                    observed,
                    oracle_probability,
                });
            }
        }
    }
    Ok(CorrectnessReport {
        configurations: 1 << bits,
        blocks_checked: (1 << bits) * elements,
        min_oracle_probability,
        failures,
    })
}
