use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::state::PvmOutcome;

use super::cost::DownloadCost;
use super::pipeline::AnswerMessage;

/// Measurement result for one universal-set element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementOutcome {
    pub label: String,
    pub outcome: PvmOutcome,
    /// Probability of the observed outcome.
    pub probability: f64,
    /// Exact probability that this block lands in the Byzantine complement.
    pub byzantine_probability: f64,
    /// Count after the leader folds in its own membership, when determinable.
    pub leader_refined: Option<u32>,
    /// `phi_m` if the decoded block is exactly a Fourier state, otherwise a
    /// coarse description.
    pub decoded_state: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregationReport {
    pub prime: u32,
    pub parties: usize,
    pub elements: usize,
    pub leader: usize,
    pub leader_encodes: bool,
    pub per_element: Vec<ElementOutcome>,
    pub download_cost: DownloadCost,
    pub transmitted_qudits: usize,
    /// Phase exponents of the honestly decoded blocks (structured engine).
    pub decoded_exponents: Vec<Vec<u32>>,
    pub transcript_digest: String,
}

impl AggregationReport {
    pub fn outcomes(&self) -> Vec<PvmOutcome> {
        self.per_element.iter().map(|e| e.outcome).collect()
    }

    pub fn download_cost_bits(&self) -> f64 {
        self.download_cost.total_bits
    }

    /// `phi_a (x) phi_b (x) …` over all blocks.
    pub fn decoded_state(&self) -> String {
        self.per_element
            .iter()
            .map(|e| e.decoded_state.as_str())
            .collect::<Vec<_>>()
            .join(" (x) ")
    }

    /// Plain-text rendering with a fixed field order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("qpma-report v1\n");
        let _ = writeln!(out, "prime = {}", self.prime);
        let _ = writeln!(out, "parties = {}", self.parties);
        let _ = writeln!(out, "elements = {}", self.elements);
        let _ = writeln!(out, "leader = {}", self.leader);
        let _ = writeln!(out, "leader_encodes = {}", self.leader_encodes);
        let semantics = if self.leader_encodes {
            "outcome = sum of all parties mod P"
        } else {
            "outcome = sum of non-leader parties mod P"
        };
        let _ = writeln!(out, "outcome_semantics = {semantics}");
        let _ = writeln!(out, "download_cost_bits = {}", self.download_cost.total_bits);
        let _ = writeln!(
            out,
            "per_element_cost_bits = {}",
            self.download_cost.per_element_bits
        );
        let _ = writeln!(out, "transmitted_qudits = {}", self.transmitted_qudits);
        let _ = writeln!(out, "decoded_state = {}", self.decoded_state());
        for e in &self.per_element {
            let refined = e
                .leader_refined
                .map_or_else(|| "-".to_string(), |r| r.to_string());
            let _ = writeln!(
                out,
                "element {}: outcome = {}, probability = {}, refined = {}, p_byzantine = {}",
                e.label, e.outcome, e.probability, refined, e.byzantine_probability
            );
        }
        let _ = writeln!(out, "transcript_digest = {}", self.transcript_digest);
        out
    }
}

/// SHA-256 over every answer in party order.
pub fn transcript_digest(answers: &[AnswerMessage], leader: usize) -> String {
    let mut hasher = Sha256::new();
    for a in answers {
        let line = format!(
            "party={} transmitted={} powers={:?} tampered={:?}\n",
            a.party,
            a.party != leader,
            a.powers,
            a.tampered_blocks
        );
        hasher.update(line.as_bytes());
    }
    hex::encode(hasher.finalize())
}
