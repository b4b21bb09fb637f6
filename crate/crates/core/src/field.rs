//! Arithmetic over the prime field Z_P and the P-th roots of unity.
//!
//! Field elements are plain `u32` values kept in the canonical range
//! `[0, P)`. Phase exponents stay integral until [`PrimeField::omega_power`]
//! turns them into complex numbers, so the structured engine never
//! accumulates rounding error.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{QpmaError, Result};

/// Largest modulus accepted; keeps every product of two canonical
/// elements inside `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least prime `p` with `p >= n`. For `n <= 2` this is 2.
pub fn smallest_prime_geq(n: u64) -> u64 {
    let mut candidate = n.max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// Exponent `a` of the root of unity `ω_P^a`, canonical in `[0, P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseExponent(u32);

impl PhaseExponent {
    pub fn value(self) -> u32 {
        self.0
    }
}

/// The field Z_P for a prime `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u32,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus > MAX_MODULUS || !is_prime(modulus) {
            return Err(QpmaError::NotPrime(modulus));
        }
        Ok(Self {
            modulus: modulus as u32,
        })
    }

    /// Field for the smallest prime at least `parties`.
    pub fn for_parties(parties: usize) -> Self {
        let p = smallest_prime_geq(parties as u64);
        Self { modulus: p as u32 }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of elements as a `usize`, handy for sizing vectors.
    pub fn order(&self) -> usize {
        self.modulus as usize
    }

    /// Reduces an arbitrary integer into the canonical range.
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.modulus as i64) as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        debug_assert!(x < self.modulus && y < self.modulus);
        ((x as u64 + y as u64) % self.modulus as u64) as u32
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        debug_assert!(x < self.modulus && y < self.modulus);
        ((x as u64 * y as u64) % self.modulus as u64) as u32
    }

    pub fn neg(&self, x: u32) -> u32 {
        debug_assert!(x < self.modulus);
        if x == 0 {
            0
        } else {
            self.modulus - x
        }
    }

    pub fn exponent(&self, a: i64) -> PhaseExponent {
        PhaseExponent(self.reduce(a))
    }

    /// `ω_P^a = exp(2πi·a/P)`.
    pub fn omega_power(&self, a: PhaseExponent) -> Complex64 {
        let angle = TAU * a.0 as f64 / self.modulus as f64;
        let (sin, cos) = angle.sin_cos();
        Complex64::new(cos, sin)
    }

    /// All `P` roots of unity indexed by exponent.
    pub fn omega_table(&self) -> Vec<Complex64> {
        (0..self.modulus)
            .map(|a| self.omega_power(PhaseExponent(a)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_prime_examples() {
        assert_eq!(smallest_prime_geq(3), 3);
        assert_eq!(smallest_prime_geq(2), 2);
        assert_eq!(smallest_prime_geq(4), 5);
        assert_eq!(smallest_prime_geq(1), 2);
        assert_eq!(smallest_prime_geq(24), 29);
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeField::new(9), Err(QpmaError::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(QpmaError::NotPrime(1)));
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(f3.add(2, 1), 0);
        assert_eq!(f3.mul(2, 2), 1);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.neg(0), 0);
        assert_eq!(f5.neg(2), 3);
        assert_eq!(f5.sub(1, 3), 3);
        assert_eq!(f5.reduce(-7), 3);
    }

    #[test]
    fn omega_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let one = f3.omega_power(f3.exponent(0));
        assert_eq!(one, Complex64::new(1.0, 0.0));
        let w = f3.omega_power(f3.exponent(1));
        assert!((w.re + 0.5).abs() < 1e-15);
        assert!((w.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.omega_power(f5.exponent(5)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn roots_are_distinct_and_sum_to_zero() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            let table = f.omega_table();
            let sum: Complex64 = table.iter().sum();
            assert!(sum.norm() < 1e-13, "P={p}: {sum}");
            for i in 0..table.len() {
                assert!((table[i].norm() - 1.0).abs() < 1e-15);
                for j in 0..i {
                    assert!((table[i] - table[j]).norm() > 1e-6);
                }
            }
        }
    }

    fn field_and_pair() -> impl Strategy<Value = (PrimeField, u32, u32)> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101])
            .prop_flat_map(|p| (Just(PrimeField::new(p).unwrap()), 0..p as u32, 0..p as u32))
    }

    proptest! {
        #[test]
        fn omega_is_multiplicative((f, a, b) in field_and_pair()) {
            let lhs = f.omega_power(f.exponent(a as i64)) * f.omega_power(f.exponent(b as i64));
            let rhs = f.omega_power(f.exponent(f.add(a, b) as i64));
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }

        #[test]
        fn field_ops_stay_canonical((f, a, b) in field_and_pair()) {
            let p = f.modulus();
            prop_assert!(f.add(a, b) < p);
            prop_assert!(f.mul(a, b) < p);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            prop_assert_eq!(f.add(f.sub(a, b), b), a);
        }

        #[test]
        fn smallest_prime_is_idempotent(n in 1u64..5000) {
            let p = smallest_prime_geq(n);
            prop_assert!(p >= n);
            prop_assert_eq!(smallest_prime_geq(p), p);
            prop_assert!((n..p).all(|m| !is_prime(m)));
        }
    }
}
