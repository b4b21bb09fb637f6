//! End-to-end execution of the aggregation protocol.
//!
//! The pipeline is setup → per-party encoding → transmission to the
//! leader → pad removal → per-block Fourier measurement. Honest runs use
//! the structured engine throughout; blocks named by a Byzantine spec are
//! re-simulated on the dense engine so non-diagonal tampering is possible.

mod cost;
mod execute;
mod pipeline;
mod report;
mod scenario;
mod summation;

pub use cost::{download_cost, DownloadCost};
pub use pipeline::{
    dense_block_pipeline, encode_party, leader_decode, measure_blocks, setup, AnswerMessage,
    Channel, RandomPad, SharedSetup,
};
pub use report::{transcript_digest, AggregationReport, ElementOutcome};
pub use scenario::{
    canonical_ordering, incidence, CanonicalOrdering, IncidenceVector, PartySets, Scenario,
};
pub use summation::{run_summation, SummationConfig, SummationReport};

pub(crate) use execute::{execute, BlockResult, RunConfig};

use crate::error::Result;
use crate::state::PvmOutcome;

/// Probability above which a decoded block is reported as a definite state.
const DEFINITE: f64 = 1.0 - 1e-10;

pub fn run_qpma(scenario: &Scenario) -> Result<AggregationReport> {
    let field = scenario.validate()?;
    let ordering = scenario.ordering()?;
    let incidences = scenario.incidence_vectors()?;
    let inputs: Vec<Vec<u32>> = incidences.iter().map(|e| e.entries().to_vec()).collect();
    let run = execute(&RunConfig {
        field,
        leader: scenario.leader,
        leader_encodes: scenario.leader_encodes,
        inputs: &inputs,
        master_seed: scenario.master_seed,
        byzantine: scenario.byzantine.as_ref(),
    })?;

    let leader_bits = &incidences[scenario.leader];
    let per_element = run
        .blocks
        .iter()
        .enumerate()
        .map(|(l, block)| {
            let own = leader_bits.get(l);
            let leader_refined = match block.measurement.outcome {
                PvmOutcome::Byzantine => None,
                PvmOutcome::Fourier(m) if !scenario.leader_encodes => Some(m + own),
                // a zero sum with the leader present means everyone holds it
                PvmOutcome::Fourier(0) if own == 1 => Some(scenario.parties as u32),
                PvmOutcome::Fourier(m) => Some(m),
            };
            ElementOutcome {
                label: ordering.label(l).to_string(),
                outcome: block.measurement.outcome,
                probability: block.measurement.probability,
                byzantine_probability: block.probability_of(PvmOutcome::Byzantine),
                leader_refined,
                decoded_state: describe(block),
            }
        })
        .collect();

    Ok(AggregationReport {
        prime: field.modulus(),
        parties: scenario.parties,
        elements: scenario.elements(),
        leader: scenario.leader,
        leader_encodes: scenario.leader_encodes,
        per_element,
        download_cost: download_cost(scenario.parties, scenario.elements(), field.modulus() as u64)?,
        transmitted_qudits: run.transmitted_qudits,
        decoded_exponents: run.decoded.iter().map(|b| b.exponents().to_vec()).collect(),
        transcript_digest: transcript_digest(&run.answers, scenario.leader),
    })
}

fn describe(block: &BlockResult) -> String {
    match block.distribution.iter().find(|(_, p)| *p > DEFINITE) {
        Some((PvmOutcome::Fourier(m), _)) => format!("phi_{m}"),
        Some((PvmOutcome::Byzantine, _)) => "off_subspace".to_string(),
        None => "superposition".to_string(),
    }
}
