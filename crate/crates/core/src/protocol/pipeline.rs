//! The individual protocol stages. [`run_qpma`](super::run_qpma) strings
//! them together; they are public so tests and the verifiers can drive
//! or intercept any single step.

use rand::Rng;

use crate::analysis::ByzantineSpec;
use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::rng::{stream_rng, Stream};
use crate::state::{sample_index, DenseBlockState, Measurement, PhaseBlockState, PvmOutcome};

use super::Scenario;

/// Uniform vector in `F_P^K` shared between one party and the leader.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomPad(Vec<u32>);

impl RandomPad {
    pub fn zero(elements: usize) -> Self {
        Self(vec![0; elements])
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, elements: usize, rng: &mut R) -> Self {
        Self(
            (0..elements)
                .map(|_| rng.random_range(0..field.modulus()))
                .collect(),
        )
    }

    pub fn from_entries(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, element: usize) -> u32 {
        self.0[element]
    }
}

/// State shared before encoding starts: `K` copies of `ψ` and one pad per
/// non-leader party (`None` at the leader's index). The leader holds a
/// copy of every pad.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedSetup {
    pub field: PrimeField,
    pub parties: usize,
    pub leader: usize,
    pub blocks: Vec<PhaseBlockState>,
    pub pads: Vec<Option<RandomPad>>,
}

impl SharedSetup {
    pub fn new(
        field: PrimeField,
        parties: usize,
        elements: usize,
        leader: usize,
        pad_seed: u64,
    ) -> Self {
        let mut rng = stream_rng(pad_seed, Stream::Pads);
        let pads = (0..parties)
            .map(|i| (i != leader).then(|| RandomPad::random(field, elements, &mut rng)))
            .collect();
        Self {
            field,
            parties,
            leader,
            blocks: vec![PhaseBlockState::psi(field, parties); elements],
            pads,
        }
    }

    /// Pad of `party`, or zeros for the leader.
    pub fn pad_entry(&self, party: usize, element: usize) -> u32 {
        self.pads[party].as_ref().map_or(0, |p| p.get(element))
    }
}

pub fn setup(scenario: &Scenario) -> Result<SharedSetup> {
    let field = scenario.validate()?;
    Ok(SharedSetup::new(
        field,
        scenario.parties,
        scenario.elements(),
        scenario.leader,
        scenario.master_seed,
    ))
}

/// Record of what one party did to its qudits, one entry per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnswerMessage {
    pub party: usize,
    /// Clock power the party was meant to apply to each block, `(U_i + E_i)_l`.
    pub powers: Vec<u32>,
    pub qudit_count: usize,
    /// Blocks on which the party deviated from the protocol.
    pub tampered_blocks: Vec<usize>,
}

/// Applies `Z^{(U_i + x_i)_l}` at `party`'s site of every block, where
/// `x_i` is the party's input (its incidence vector, or field elements in
/// summation mode). `pad = None` means a zero pad, as used by the leader.
pub fn encode_party(
    field: PrimeField,
    party: usize,
    inputs: &[u32],
    pad: Option<&RandomPad>,
    blocks: &[PhaseBlockState],
) -> Result<(AnswerMessage, Vec<PhaseBlockState>)> {
    if inputs.len() != blocks.len() {
        return Err(QpmaError::DimensionMismatch {
            left: blocks.len(),
            right: inputs.len(),
        });
    }
    let mut powers = Vec::with_capacity(blocks.len());
    let mut encoded = Vec::with_capacity(blocks.len());
    for (l, (block, &x)) in blocks.iter().zip(inputs).enumerate() {
        if x >= field.modulus() {
            return Err(QpmaError::InputOutOfField {
                value: x as u64,
                prime: field.modulus(),
            });
        }
        let power = field.add(pad.map_or(0, |u| u.get(l)), x);
        encoded.push(block.apply(party, power)?);
        powers.push(power);
    }
    let message = AnswerMessage {
        party,
        qudit_count: powers.len(),
        powers,
        tampered_blocks: Vec::new(),
    };
    Ok((message, encoded))
}

type Tap<'t> = Box<dyn FnMut(&AnswerMessage) + 't>;

/// Ordered, reliable in-memory link from the parties to the leader, with
/// an optional tap that observes every message in transit.
#[derive(Default)]
pub struct Channel<'t> {
    log: Vec<AnswerMessage>,
    tap: Option<Tap<'t>>,
}

impl<'t> Channel<'t> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_tap(tap: impl FnMut(&AnswerMessage) + 't) -> Self {
        Self {
            log: Vec::new(),
            tap: Some(Box::new(tap)),
        }
    }

    pub fn send(&mut self, message: AnswerMessage) {
        if let Some(tap) = self.tap.as_mut() {
            tap(&message);
        }
        self.log.push(message);
    }

    pub fn messages(&self) -> &[AnswerMessage] {
        &self.log
    }

    pub fn into_messages(self) -> Vec<AnswerMessage> {
        self.log
    }

    pub fn transmitted_qudits(&self) -> usize {
        self.log.iter().map(|m| m.qudit_count).sum()
    }
}

/// Leader's decoding step: `Z^{-(U_k)_l}` on every non-leader site of
/// every block. Aborts if any non-leader answer is missing.
pub fn leader_decode(
    setup: &SharedSetup,
    answers: &[AnswerMessage],
    blocks: &[PhaseBlockState],
) -> Result<Vec<PhaseBlockState>> {
    let field = setup.field;
    for k in (0..setup.parties).filter(|&k| k != setup.leader) {
        if !answers.iter().any(|a| a.party == k) {
            return Err(QpmaError::MissingAnswer(k));
        }
    }
    blocks
        .iter()
        .enumerate()
        .map(|(l, block)| {
            (0..setup.parties)
                .filter(|&k| k != setup.leader)
                .try_fold(block.clone(), |state, k| {
                    state.apply(k, field.neg(setup.pad_entry(k, l)))
                })
        })
        .collect()
}

/// Fourier-basis measurement of each decoded block. Structured states live
/// in the GHZ subspace, so the Byzantine label has probability zero here.
pub fn measure_blocks<R: Rng + ?Sized>(blocks: &[PhaseBlockState], rng: &mut R) -> Vec<Measurement> {
    blocks
        .iter()
        .map(|block| {
            let probs = block.fourier_probabilities();
            let idx = sample_index(&probs, rng.random::<f64>());
            Measurement {
                outcome: PvmOutcome::Fourier(idx as u32),
                probability: probs[idx],
            }
        })
        .collect()
}

/// Dense-engine evolution of a single block through encode and decode.
///
/// `inputs[i]` and `pads[i]` are party `i`'s input and pad entry for this
/// block (the leader's pad entry is ignored). When `tamper` is given, the
/// named party deviates as its spec describes.
pub fn dense_block_pipeline(
    field: PrimeField,
    leader: usize,
    leader_encodes: bool,
    inputs: &[u32],
    pads: &[u32],
    mut tamper: Option<(&ByzantineSpec, &mut dyn rand::RngCore)>,
) -> Result<DenseBlockState> {
    let parties = inputs.len();
    let mut state = DenseBlockState::psi(field, parties)?;
    for (i, &x) in inputs.iter().enumerate() {
        if i == leader && !leader_encodes {
            continue;
        }
        let pad = if i == leader { 0 } else { pads[i] };
        let power = field.add(pad, field.reduce(x as i64));
        state = match tamper.as_mut() {
            Some((spec, rng)) if spec.party == i => spec.tamper(&state, power, &mut **rng)?,
            _ => state.clock_apply(i, power)?,
        };
    }
    for k in (0..parties).filter(|&k| k != leader) {
        state = state.clock_apply(k, field.neg(field.reduce(pads[k] as i64)))?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::BlockPvm;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn encoding_of_element_a_in_the_worked_example() {
        // N=3, L=1, E column for `a` is (1, 1, 0)
        let field = f(3);
        let setup = SharedSetup::new(field, 3, 1, 1, 5);
        let (u0, u2) = (setup.pad_entry(0, 0), setup.pad_entry(2, 0));
        let mut blocks = setup.blocks.clone();
        for (party, x) in [(0usize, 1u32), (1, 1), (2, 0)] {
            let (_, next) = encode_party(field, party, &[x], setup.pads[party].as_ref(), &blocks).unwrap();
            blocks = next;
        }
        let expected = field.reduce(2 + u0 as i64 + u2 as i64);
        assert_eq!(blocks[0].fourier_label(), Some(expected));
    }

    #[test]
    fn zero_inputs_and_pads_leave_blocks_unchanged() {
        let field = f(5);
        let blocks = vec![PhaseBlockState::psi(field, 4); 3];
        let (msg, out) = encode_party(field, 2, &[0, 0, 0], None, &blocks).unwrap();
        assert_eq!(out, blocks);
        assert_eq!(msg.powers, vec![0, 0, 0]);
        assert_eq!(msg.qudit_count, 3);
        assert!(encode_party(field, 2, &[5, 0, 0], None, &blocks).is_err());
    }

    #[test]
    fn decode_requires_every_non_leader_answer() {
        let field = f(3);
        let setup = SharedSetup::new(field, 3, 2, 0, 1);
        let answer = AnswerMessage {
            party: 1,
            powers: vec![0, 0],
            qudit_count: 2,
            tampered_blocks: vec![],
        };
        assert_eq!(
            leader_decode(&setup, &[answer], &setup.blocks),
            Err(QpmaError::MissingAnswer(2))
        );
    }

    #[test]
    fn zero_pads_make_decode_the_identity() {
        let field = f(3);
        let mut setup = SharedSetup::new(field, 3, 2, 0, 1);
        setup.pads = vec![None, Some(RandomPad::zero(2)), Some(RandomPad::zero(2))];
        let blocks = vec![PhaseBlockState::phi(field, 3, 2), PhaseBlockState::phi(field, 3, 1)];
        let answers: Vec<_> = (1..3)
            .map(|party| AnswerMessage {
                party,
                powers: vec![0, 0],
                qudit_count: 2,
                tampered_blocks: vec![],
            })
            .collect();
        assert_eq!(leader_decode(&setup, &answers, &blocks).unwrap(), blocks);
    }

    #[test]
    fn channel_tap_sees_every_message() {
        let mut seen = Vec::new();
        {
            let mut channel = Channel::with_tap(|m: &AnswerMessage| seen.push(m.party));
            for party in [2, 0] {
                channel.send(AnswerMessage {
                    party,
                    powers: vec![1],
                    qudit_count: 1,
                    tampered_blocks: vec![],
                });
            }
            assert_eq!(channel.transmitted_qudits(), 2);
        }
        assert_eq!(seen, vec![2, 0]);
    }

    #[test]
    fn dense_pipeline_matches_structured_result() {
        let field = f(5);
        let inputs = [1, 0, 1, 1];
        let pads = [3, 0, 4, 2];
        let dense = dense_block_pipeline(field, 1, true, &inputs, &pads, None).unwrap();
        let pvm = BlockPvm::new(field, 4).unwrap();
        let probs = pvm.probabilities(&dense).unwrap();
        assert!((probs[3].1 - 1.0).abs() < 1e-10);
    }
}
