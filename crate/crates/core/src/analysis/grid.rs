//! The verification grid behind `qpma verify`.

use std::fmt::Write as _;

use crate::error::Result;
use crate::field::{is_prime, PrimeField};
use crate::protocol::{download_cost, IncidenceVector, Scenario};
use crate::state::block_dimension;

use super::{
    byzantine_experiment, engine_equivalence, fourier_orthonormality_error,
    verify_correctness_exhaustive, verify_entropy_checks, verify_privacy, verify_security,
    ByzantineSpec, PadAveraging, PrivacyCheck, PrivacyQuery, PriorModel, TamperMode,
    MAX_CORRECTNESS_BITS,
};

/// Block dimensions above this are skipped by the grid.
const GRID_MAX_DIM: usize = 4096;
const PRIVACY_MAX_BITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBounds {
    pub max_parties: usize,
    pub max_elements: usize,
    pub max_prime: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for GridBounds {
    fn default() -> Self {
        Self {
            max_parties: 3,
            max_elements: 2,
            max_prime: 5,
            trials: 1000,
            seed: 1,
        }
    }
}

/// One line of the verification table. `value` must stay below
/// `tolerance` unless `at_least` is set, in which case it must reach it.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub case_id: String,
    pub quantity: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationRow {
    fn below(case_id: String, quantity: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            case_id,
            quantity,
            value,
            tolerance,
            pass: value < tolerance,
        }
    }

    fn exact(case_id: String, quantity: &'static str, value: f64, expected: f64) -> Self {
        Self {
            case_id,
            quantity,
            value,
            tolerance: expected,
            pass: value == expected,
        }
    }
}

pub fn render_table(rows: &[VerificationRow]) -> String {
    let mut out = String::from("case_id\tquantity\tvalue\ttolerance\tstatus\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{:e}\t{:e}\t{}",
            r.case_id,
            r.quantity,
            r.value,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "# {} cases, {} failed", rows.len(), failed);
    out
}

fn primes_between(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo.max(2)..=hi).filter(|&p| is_prime(p))
}

fn all_assignments(parties: usize, elements: usize) -> Vec<Vec<IncidenceVector>> {
    let bits = parties * elements;
    (0u64..(1 << bits))
        .map(|config| {
            (0..parties)
                .map(|i| {
                    IncidenceVector::from_bits(
                        (0..elements)
                            .map(|l| ((config >> (i * elements + l)) & 1) as u32)
                            .collect(),
                    )
                })
                .collect()
        })
        .collect()
}

pub fn run_verification_grid(bounds: &GridBounds) -> Result<Vec<VerificationRow>> {
    let mut rows = Vec::new();
    let GridBounds {
        max_parties,
        max_elements,
        max_prime,
        trials,
        seed,
    } = *bounds;

    for p in primes_between(2, max_prime) {
        let field = PrimeField::new(p)?;
        for n in 1..=max_parties {
            if block_dimension(field, n).map_or(true, |d| d > GRID_MAX_DIM) {
                continue;
            }
            rows.push(VerificationRow::below(
                format!("fourier/P{p}/N{n}"),
                "max |<phi_m|phi_n> - delta|",
                fourier_orthonormality_error(field, n)?,
                1e-13,
            ));
            rows.push(VerificationRow::below(
                format!("engines/P{p}/N{n}"),
                "max amplitude gap",
                engine_equivalence(field, n, 50, 12, seed)?,
                1e-12,
            ));
            let entropy = verify_entropy_checks(field, n)?;
            rows.push(VerificationRow::below(
                format!("entropy/P{p}/N{n}"),
                "max entropy error",
                entropy.max_error(),
                1e-10,
            ));
        }
    }

    for n in 2..=max_parties {
        for p in primes_between(n as u64, max_prime.max(n as u64)) {
            let field = PrimeField::new(p)?;
            if block_dimension(field, n).map_or(true, |d| d > GRID_MAX_DIM) {
                continue;
            }
            for k in 1..=max_elements {
                if n * k <= MAX_CORRECTNESS_BITS {
                    let r = verify_correctness_exhaustive(field, n, k)?;
                    rows.push(VerificationRow::exact(
                        format!("correctness/N{n}/K{k}/P{p}"),
                        "failing blocks",
                        r.failures.len() as f64,
                        0.0,
                    ));
                }
                let cost = download_cost(n, k, p)?;
                let formula = (n - 1) as f64 * k as f64 * (p as f64).log2();
                rows.push(VerificationRow::below(
                    format!("cost/N{n}/K{k}/P{p}"),
                    "|cost - (N-1)K log2 P|",
                    (cost.total_bits - formula).abs(),
                    1e-12,
                ));
            }
            security_rows(&mut rows, field, n, max_elements)?;
            privacy_rows(&mut rows, field, n, max_elements, seed)?;
            byzantine_rows(&mut rows, p, n, trials, seed)?;
        }
    }
    Ok(rows)
}

fn security_rows(
    rows: &mut Vec<VerificationRow>,
    field: PrimeField,
    parties: usize,
    max_elements: usize,
) -> Result<()> {
    let leader = 0;
    let p = field.modulus();
    // all-links pad averaging costs P^(N-1) dense states per column
    let k = (1..=max_elements).rev().find(|&k| parties * k <= 8).unwrap_or(1);
    let assignments = all_assignments(parties, k);
    let mut intercepts: Vec<(String, Vec<usize>)> = (1..parties)
        .map(|i| (format!("link{i}"), vec![i]))
        .collect();
    intercepts.push(("all-links".to_string(), (1..parties).collect()));
    for (name, sites) in intercepts {
        let r = verify_security(field, leader, &assignments, &sites, PadAveraging::Exact)?;
        rows.push(VerificationRow::below(
            format!("security/N{parties}/K{k}/P{p}/{name}"),
            "max trace distance",
            r.max_trace_distance,
            1e-10,
        ));
    }
    Ok(())
}

fn privacy_rows(
    rows: &mut Vec<VerificationRow>,
    field: PrimeField,
    parties: usize,
    max_elements: usize,
    seed: u64,
) -> Result<()> {
    for k in 1..=max_elements {
        if parties * k > PRIVACY_MAX_BITS {
            break;
        }
        for q in [0.25, 0.5, 0.75] {
            let mut worst: f64 = 0.0;
            for party in 0..parties {
                for element in 0..k {
                    for outcome in 0..field.modulus() {
                        let check = verify_privacy(
                            field,
                            &PrivacyQuery {
                                parties,
                                elements: k,
                                leader: 0,
                                prior: PriorModel::new(q)?,
                                party,
                                element,
                                outcome,
                                pad_seed: seed,
                            },
                        )?;
                        if let PrivacyCheck::Posteriors { .. } = check {
                            worst = worst.max(check.deviation());
                        }
                    }
                }
            }
            rows.push(VerificationRow::below(
                format!("privacy/N{parties}/K{k}/P{}/q{q}", field.modulus()),
                "max posterior gap",
                worst,
                1e-12,
            ));
        }
    }
    Ok(())
}

fn byzantine_rows(
    rows: &mut Vec<VerificationRow>,
    prime: u64,
    parties: usize,
    trials: usize,
    seed: u64,
) -> Result<()> {
    let universal: Vec<String> = vec!["x".into(), "y".into()];
    let sets: Vec<Vec<String>> = (0..parties)
        .map(|i| if i % 2 == 0 { vec!["x".to_string()] } else { vec![] })
        .collect();
    let mut scenario = Scenario::new(universal, sets, 0, seed);
    scenario.prime_override = Some(prime);
    let case = |mode: &str| format!("byzantine/N{parties}/P{prime}/{mode}");
    let spec = |mode| ByzantineSpec {
        party: parties - 1,
        mode,
        blocks: vec![0, 1],
    };

    let wrong = byzantine_experiment(&scenario, &spec(TamperMode::WrongPhase { delta: 1 }), trials)?;
    rows.push(VerificationRow::exact(case("wrong_phase"), "detection rate", wrong.detection_rate, 0.0));
    rows.push(VerificationRow::exact(case("wrong_phase"), "misreport rate", wrong.misreport_rate, 1.0));

    let shift = byzantine_experiment(&scenario, &spec(TamperMode::Shift), trials)?;
    rows.push(VerificationRow::exact(case("shift"), "detection rate", shift.detection_rate, 1.0));

    let unitary = byzantine_experiment(&scenario, &spec(TamperMode::RandomUnitary), trials)?;
    rows.push(VerificationRow::below(
        case("random_unitary"),
        "|sampled - exact| detection",
        (unitary.detection_rate - unitary.exact_detection_probability).abs(),
        5.0 / (unitary.observations as f64).sqrt(),
    ));
    Ok(())
}
