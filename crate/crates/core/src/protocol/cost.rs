use crate::error::{QpmaError, Result};
use crate::field::is_prime;

/// Download cost of one run as seen by the leader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownloadCost {
    /// `(N-1)·K·log2 P`.
    pub total_bits: f64,
    /// `(N-1)·log2 P`, the average cost per universal-set element.
    pub per_element_bits: f64,
    /// Qudits physically received, `(N-1)·K`.
    pub qudits: usize,
}

pub fn download_cost(parties: usize, elements: usize, prime: u64) -> Result<DownloadCost> {
    if parties < 2 {
        return Err(QpmaError::scenario("parties_at_least_two", format!("got {parties}")));
    }
    if elements == 0 {
        return Err(QpmaError::scenario("universal_set_nonempty", "K must be at least 1"));
    }
    if !is_prime(prime) {
        return Err(QpmaError::NotPrime(prime));
    }
    if (prime as usize) < parties {
        return Err(QpmaError::PrimeBelowParties { prime, parties });
    }
    let per_element_bits = (parties - 1) as f64 * (prime as f64).log2();
    Ok(DownloadCost {
        total_bits: per_element_bits * elements as f64,
        per_element_bits,
        qudits: (parties - 1) * elements,
    })
}
