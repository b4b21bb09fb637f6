use std::fmt::Write as _;

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::state::PvmOutcome;

use super::execute::{execute, RunConfig};
use super::report::transcript_digest;

/// Private summation of field elements: party `i` contributes
/// `inputs[i][l]` to block `l`, and the leader learns each block's sum mod P.
#[derive(Debug, Clone, PartialEq)]
pub struct SummationConfig {
    pub prime: u64,
    pub leader: usize,
    pub inputs: Vec<Vec<u64>>,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummationReport {
    pub prime: u32,
    pub parties: usize,
    pub leader: usize,
    pub sums: Vec<PvmOutcome>,
    pub transcript_digest: String,
}

impl SummationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::from("qpma-summation v1\n");
        let _ = writeln!(out, "prime = {}", self.prime);
        let _ = writeln!(out, "parties = {}", self.parties);
        let _ = writeln!(out, "leader = {}", self.leader);
        for (l, s) in self.sums.iter().enumerate() {
            let _ = writeln!(out, "block {l}: sum = {s}");
        }
        let _ = writeln!(out, "transcript_digest = {}", self.transcript_digest);
        out
    }
}

pub fn run_summation(config: &SummationConfig) -> Result<SummationReport> {
    let field = PrimeField::new(config.prime)?;
    let parties = config.inputs.len();
    if parties < 2 {
        return Err(QpmaError::scenario("parties_at_least_two", format!("got {parties}")));
    }
    if config.leader >= parties {
        return Err(QpmaError::scenario(
            "leader_in_range",
            format!("leader {} with {parties} parties", config.leader),
        ));
    }
    let blocks = config.inputs[0].len();
    if blocks == 0 || config.inputs.iter().any(|row| row.len() != blocks) {
        return Err(QpmaError::scenario(
            "equal_input_lengths",
            "every party needs the same nonzero number of inputs",
        ));
    }
    let mut inputs = Vec::with_capacity(parties);
    for row in &config.inputs {
        let mut converted = Vec::with_capacity(blocks);
        for &x in row {
            if x >= config.prime {
                return Err(QpmaError::InputOutOfField {
                    value: x,
                    prime: field.modulus(),
                });
            }
            converted.push(x as u32);
        }
        inputs.push(converted);
    }
    let run = execute(&RunConfig {
        field,
        leader: config.leader,
        leader_encodes: true,
        inputs: &inputs,
        master_seed: config.master_seed,
        byzantine: None,
    })?;
    Ok(SummationReport {
        prime: field.modulus(),
        parties,
        leader: config.leader,
        sums: run.blocks.iter().map(|b| b.measurement.outcome).collect(),
        transcript_digest: transcript_digest(&run.answers, config.leader),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(prime: u64, inputs: Vec<Vec<u64>>) -> Result<Vec<PvmOutcome>> {
        run_summation(&SummationConfig {
            prime,
            leader: 0,
            inputs,
            master_seed: 3,
        })
        .map(|r| r.sums)
    }

    #[test]
    fn examples() {
        assert_eq!(sum(5, vec![vec![2], vec![3], vec![4]]).unwrap(), vec![PvmOutcome::Fourier(4)]);
        assert_eq!(
            sum(7, vec![vec![0, 0], vec![0, 0]]).unwrap(),
            vec![PvmOutcome::Fourier(0); 2]
        );
        assert_eq!(
            sum(5, vec![vec![5], vec![0]]),
            Err(QpmaError::InputOutOfField { value: 5, prime: 5 })
        );
        assert!(sum(6, vec![vec![1], vec![1]]).is_err());
        assert!(sum(5, vec![vec![1], vec![1, 2]]).is_err());
    }
}
