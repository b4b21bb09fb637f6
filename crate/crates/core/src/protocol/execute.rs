use crate::analysis::ByzantineSpec;
use crate::error::Result;
use crate::field::PrimeField;
use crate::rng::{stream_rng, Stream};
use crate::state::{sample_index, BlockPvm, Measurement, PhaseBlockState, PvmOutcome};

use super::pipeline::{
    dense_block_pipeline, encode_party, leader_decode, measure_blocks, AnswerMessage, Channel,
    SharedSetup,
};

/// Inputs of one protocol execution, independent of how the inputs were
/// obtained (incidence vectors or summation terms).
pub(crate) struct RunConfig<'a> {
    pub field: PrimeField,
    pub leader: usize,
    pub leader_encodes: bool,
    /// `inputs[i][l]`: party `i`'s field element for block `l`.
    pub inputs: &'a [Vec<u32>],
    pub master_seed: u64,
    pub byzantine: Option<&'a ByzantineSpec>,
}

#[derive(Debug, Clone)]
pub(crate) struct BlockResult {
    /// Exact probability of every PVM label, Byzantine last.
    pub distribution: Vec<(PvmOutcome, f64)>,
    pub measurement: Measurement,
}

impl BlockResult {
    pub fn probability_of(&self, outcome: PvmOutcome) -> f64 {
        self.distribution
            .iter()
            .find(|(o, _)| *o == outcome)
            .map_or(0.0, |(_, p)| *p)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Execution {
    /// Every party's answer in party order, the leader's included when it encodes.
    pub answers: Vec<AnswerMessage>,
    pub transmitted_qudits: usize,
    /// Structured decoded blocks (tampered blocks are re-simulated densely).
    pub decoded: Vec<PhaseBlockState>,
    pub blocks: Vec<BlockResult>,
}

pub(crate) fn execute(cfg: &RunConfig<'_>) -> Result<Execution> {
    let parties = cfg.inputs.len();
    let elements = cfg.inputs.first().map_or(0, Vec::len);
    let field = cfg.field;
    let setup = SharedSetup::new(field, parties, elements, cfg.leader, cfg.master_seed);

    let mut blocks = setup.blocks.clone();
    let mut answers = Vec::with_capacity(parties);
    let mut channel = Channel::new();
    for party in 0..parties {
        if party == cfg.leader && !cfg.leader_encodes {
            continue;
        }
        let (mut message, next) = encode_party(
            field,
            party,
            &cfg.inputs[party],
            setup.pads[party].as_ref(),
            &blocks,
        )?;
        blocks = next;
        if let Some(spec) = cfg.byzantine.filter(|s| s.party == party) {
            message.tampered_blocks = spec.blocks.clone();
        }
        answers.push(message.clone());
        // the leader's own qudits never leave it
        if party != cfg.leader {
            channel.send(message);
        }
    }
    let transmitted_qudits = channel.transmitted_qudits();
    let decoded = leader_decode(&setup, channel.messages(), &blocks)?;

    let mut meas_rng = stream_rng(cfg.master_seed, Stream::Measurement);
    let honest = measure_blocks(&decoded, &mut meas_rng);
    let mut results: Vec<BlockResult> = decoded
        .iter()
        .zip(honest)
        .map(|(block, measurement)| {
            let mut distribution: Vec<_> = block
                .fourier_probabilities()
                .into_iter()
                .enumerate()
                .map(|(m, p)| (PvmOutcome::Fourier(m as u32), p))
                .collect();
            distribution.push((PvmOutcome::Byzantine, 0.0));
            BlockResult {
                distribution,
                measurement,
            }
        })
        .collect();

    if let Some(spec) = cfg.byzantine {
        let pvm = BlockPvm::new(field, parties)?;
        let mut tamper_rng = stream_rng(cfg.master_seed, Stream::Tamper);
        for &l in &spec.blocks {
            let inputs: Vec<u32> = cfg.inputs.iter().map(|row| row[l]).collect();
            let pads: Vec<u32> = (0..parties).map(|i| setup.pad_entry(i, l)).collect();
            let state = dense_block_pipeline(
                field,
                cfg.leader,
                cfg.leader_encodes,
                &inputs,
                &pads,
                Some((spec, &mut tamper_rng)),
            )?;
            let distribution = pvm.probabilities(&state)?;
            let weights: Vec<f64> = distribution.iter().map(|(_, p)| *p).collect();
            let idx = sample_index(&weights, rand::Rng::random::<f64>(&mut meas_rng));
            results[l] = BlockResult {
                measurement: Measurement {
                    outcome: distribution[idx].0,
                    probability: distribution[idx].1,
                },
                distribution,
            };
        }
    }

    Ok(Execution {
        answers,
        transmitted_qudits,
        decoded,
        blocks: results,
    })
}
