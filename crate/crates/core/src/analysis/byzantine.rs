use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::protocol::{execute, RunConfig, Scenario};
use crate::rng::{derive_seed, Stream};
use crate::state::{DenseBlockState, PvmOutcome};

/// How a misbehaving party deviates on its own qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamperMode {
    /// Applies `Z^{a + delta}` instead of the intended `Z^a`.
    WrongPhase { delta: u32 },
    /// Applies the intended phase, then `|k⟩ ↦ |k+1 mod P⟩`.
    Shift,
    /// Applies the intended phase, then a Haar-random single-qudit unitary
    /// drawn from the run's tamper stream.
    RandomUnitary,
}

impl fmt::Display for TamperMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TamperMode::WrongPhase { delta } => write!(f, "wrong_phase(+{delta})"),
            TamperMode::Shift => f.write_str("shift"),
            TamperMode::RandomUnitary => f.write_str("random_unitary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByzantineSpec {
    pub party: usize,
    pub mode: TamperMode,
    pub blocks: Vec<usize>,
}

impl ByzantineSpec {
    pub fn validate(&self, parties: usize, leader: usize, elements: usize) -> Result<()> {
        if self.party >= parties {
            return Err(QpmaError::scenario(
                "byzantine_party_in_range",
                format!("party {} with {parties} parties", self.party),
            ));
        }
        if self.party == leader {
            return Err(QpmaError::scenario(
                "byzantine_party_not_leader",
                format!("party {} is the leader", self.party),
            ));
        }
        if self.blocks.is_empty() {
            return Err(QpmaError::scenario("byzantine_blocks_nonempty", "no blocks listed"));
        }
        if let Some(&b) = self.blocks.iter().find(|&&b| b >= elements) {
            return Err(QpmaError::scenario(
                "byzantine_blocks_in_range",
                format!("block {b} with {elements} elements"),
            ));
        }
        Ok(())
    }

    /// The tampering party's action on `state`, given the power it should
    /// have applied.
    pub fn tamper(
        &self,
        state: &DenseBlockState,
        intended_power: u32,
        rng: &mut dyn RngCore,
    ) -> Result<DenseBlockState> {
        let field = state.field();
        match self.mode {
            TamperMode::WrongPhase { delta } => {
                let power = field.add(intended_power, field.reduce(delta as i64));
                state.clock_apply(self.party, power)
            }
            TamperMode::Shift => state
                .clock_apply(self.party, intended_power)?
                .apply_site_operator(self.party, &shift_operator(field)),
            TamperMode::RandomUnitary => state
                .clock_apply(self.party, intended_power)?
                .apply_site_operator(self.party, &haar_unitary(field.order(), rng)),
        }
    }
}

/// Cyclic shift `|k⟩ ↦ |k+1 mod P⟩`.
pub fn shift_operator(field: PrimeField) -> DMatrix<Complex64> {
    let p = field.order();
    DMatrix::from_fn(p, p, |row, col| {
        if row == (col + 1) % p {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Haar-distributed `d x d` unitary: QR of a complex Ginibre matrix with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut dyn RngCore) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Tallies over `trials × |spec.blocks|` block observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ByzantineReport {
    pub mode: TamperMode,
    pub trials: usize,
    pub observations: usize,
    pub detections: usize,
    pub misreports: usize,
    pub detection_rate: f64,
    pub misreport_rate: f64,
    /// Mean over observations of the exact complement probability.
    pub exact_detection_probability: f64,
    /// Mean over observations of the exact probability of a wrong Fourier label.
    pub exact_misreport_probability: f64,
    /// `shift_histogram[d]` counts in-subspace outcomes equal to the true
    /// sum plus `d` (mod P).
    pub shift_histogram: Vec<usize>,
}

pub fn byzantine_experiment(
    scenario: &Scenario,
    spec: &ByzantineSpec,
    trials: usize,
) -> Result<ByzantineReport> {
    if trials == 0 {
        return Err(QpmaError::scenario("trials_positive", "need at least one trial"));
    }
    let mut scenario = scenario.clone();
    scenario.byzantine = Some(spec.clone());
    let field = scenario.validate()?;
    crate::state::block_dimension(field, scenario.parties)?;
    let inputs: Vec<Vec<u32>> = scenario
        .incidence_vectors()?
        .iter()
        .map(|e| e.entries().to_vec())
        .collect();
    let true_sum = |l: usize| {
        inputs
            .iter()
            .enumerate()
            .filter(|(i, _)| scenario.leader_encodes || *i != scenario.leader)
            .fold(0, |acc, (_, row)| field.add(acc, row[l]))
    };

    let mut detections = 0;
    let mut misreports = 0;
    let mut exact_detection = 0.0;
    let mut exact_misreport = 0.0;
    let mut shift_histogram = vec![0; field.order()];
    for t in 0..trials {
        let run = execute(&RunConfig {
            field,
            leader: scenario.leader,
            leader_encodes: scenario.leader_encodes,
            inputs: &inputs,
            master_seed: derive_seed(scenario.master_seed, Stream::Trial(t as u64)),
            byzantine: Some(spec),
        })?;
        for &l in &spec.blocks {
            let block = &run.blocks[l];
            let expected = true_sum(l);
            exact_detection += block.probability_of(PvmOutcome::Byzantine);
            exact_misreport += block
                .distribution
                .iter()
                .filter(|(o, _)| matches!(o, PvmOutcome::Fourier(m) if *m != expected))
                .map(|(_, p)| p)
                .sum::<f64>();
            match block.measurement.outcome {
                PvmOutcome::Byzantine => detections += 1,
                PvmOutcome::Fourier(m) => {
                    shift_histogram[field.sub(m, expected) as usize] += 1;
                    if m != expected {
                        misreports += 1;
                    }
                }
            }
        }
    }
    let observations = trials * spec.blocks.len();
    let n = observations as f64;
    Ok(ByzantineReport {
        mode: spec.mode,
        trials,
        observations,
        detections,
        misreports,
        detection_rate: detections as f64 / n,
        misreport_rate: misreports as f64 / n,
        exact_detection_probability: exact_detection / n,
        exact_misreport_probability: exact_misreport / n,
        shift_histogram,
    })
}
