//! Schoolbook group backend (tiny profile).
//!
//! Multiplicative subgroup of prime order `Q` inside `Z_P^*`, with `P = 2Q + 1`
//! a safe prime. "Points" are residues written multiplicatively, so point
//! addition is modular multiplication and scalar multiplication is modular
//! exponentiation. Everything fits in a `u64`, which makes exhaustive checks
//! and discrete-log cracking in tests feasible.
//!
//! Both coordinates and scalars encode as 8-byte big-endian integers.

use num_bigint::BigUint;

use super::{hash_transcript, DecodeError, Group, PointElement, ScalarElement};

const WIRE_BYTES: usize = 8;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn decode_u64(bytes: &[u8]) -> Result<u64, DecodeError> {
    let arr: [u8; WIRE_BYTES] = bytes
        .try_into()
        .map_err(|_| DecodeError::Length { expected: WIRE_BYTES, got: bytes.len() })?;
    Ok(u64::from_be_bytes(arr))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TinyScalar<const Q: u64>(u64);

impl<const Q: u64> TinyScalar<Q> {
    pub fn value(&self) -> u64 {
        self.0
    }
}

impl<const Q: u64> ScalarElement for TinyScalar<Q> {
    fn zero() -> Self {
        TinyScalar(0)
    }
    fn one() -> Self {
        TinyScalar(1 % Q)
    }
    fn from_u64(v: u64) -> Self {
        TinyScalar(v % Q)
    }
    fn add(&self, rhs: &Self) -> Self {
        TinyScalar((self.0 + rhs.0) % Q)
    }
    fn sub(&self, rhs: &Self) -> Self {
        TinyScalar((self.0 + Q - rhs.0) % Q)
    }
    fn mul(&self, rhs: &Self) -> Self {
        TinyScalar(mulmod(self.0, rhs.0, Q))
    }
    fn neg(&self) -> Self {
        TinyScalar((Q - self.0) % Q)
    }
    fn invert(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Q is prime, so Fermat inversion applies.
        Some(TinyScalar(powmod(self.0, Q - 2, Q)))
    }
    fn to_bytes(&self) -> Vec<u8> {
        self.0.to_be_bytes().to_vec()
    }
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let v = decode_u64(bytes)?;
        if v >= Q {
            return Err(DecodeError::UnreducedScalar);
        }
        Ok(TinyScalar(v))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TinyPoint<const P: u64, const Q: u64>(u64);

impl<const P: u64, const Q: u64> TinyPoint<P, Q> {
    pub fn value(&self) -> u64 {
        self.0
    }
}

impl<const P: u64, const Q: u64> PointElement for TinyPoint<P, Q> {
    type Scalar = TinyScalar<Q>;

    fn generator() -> Self {
        // 4 is a quadratic residue for every safe prime P > 5, hence lies in
        // (and generates) the order-Q subgroup.
        TinyPoint(4)
    }
    fn identity() -> Self {
        TinyPoint(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        TinyPoint(mulmod(self.0, rhs.0, P))
    }
    fn sub(&self, rhs: &Self) -> Self {
        // rhs^(Q-1) inverts rhs inside the order-Q subgroup.
        TinyPoint(mulmod(self.0, powmod(rhs.0, Q - 1, P), P))
    }
    fn mul(&self, k: &Self::Scalar) -> Self {
        TinyPoint(powmod(self.0, k.0, P))
    }
    fn to_bytes(&self) -> Vec<u8> {
        self.0.to_be_bytes().to_vec()
    }
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let v = decode_u64(bytes)?;
        if v == 0 || v >= P || powmod(v, Q, P) != 1 {
            return Err(DecodeError::OffGroup);
        }
        Ok(TinyPoint(v))
    }
}

/// Generic schoolbook group over `Z_P^*` restricted to the subgroup of prime
/// order `Q`, where `P = 2Q + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Schoolbook<const P: u64, const Q: u64>;

impl<const P: u64, const Q: u64> Group for Schoolbook<P, Q> {
    type Scalar = TinyScalar<Q>;
    type Point = TinyPoint<P, Q>;

    const ID: &'static str = "tiny";
    const SCALAR_BYTES: usize = WIRE_BYTES;
    const POINT_BYTES: usize = WIRE_BYTES;

    fn order() -> BigUint {
        BigUint::from(Q)
    }

    fn coord_scalar(p: &Self::Point) -> Self::Scalar {
        TinyScalar(p.0 % Q)
    }

    fn hash_to_scalar(tag: &str, parts: &[&[u8]]) -> Self::Scalar {
        let digest = hash_transcript(tag, parts);
        let wide = BigUint::from_bytes_be(&digest) % BigUint::from(Q);
        let mut v = 0u64;
        for d in wide.to_u64_digits() {
            v = d; // single digit since Q < 2^64
        }
        TinyScalar(v)
    }
}

/// Default tiny profile: a 21-bit order subgroup, large enough that random
/// collisions do not occur in tests yet small enough to brute-force.
pub type TinyGroup = Schoolbook<2_097_779, 1_048_889>;

/// Eleven-element group for exhaustive tests.
pub type MicroGroup = Schoolbook<23, 11>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn micro_generator_has_exact_order() {
        let g = <MicroGroup as Group>::Point::generator();
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..11u64 {
            let p = g.mul(&TinyScalar::from_u64(k));
            assert!(seen.insert(p.value()), "repeat at exponent {k}");
        }
        assert_eq!(g.mul(&TinyScalar::from_u64(11)).value(), 1);
    }

    #[test]
    fn micro_scalar_inverses_exhaustive() {
        for v in 1..11u64 {
            let s = TinyScalar::<11>::from_u64(v);
            let inv = s.invert().unwrap();
            assert_eq!(s.mul(&inv).value(), 1, "inverse failed for {v}");
        }
        assert!(TinyScalar::<11>::zero().invert().is_none());
    }

    #[test]
    fn default_params_are_a_safe_prime_pair() {
        assert_eq!(2 * 1_048_889 + 1, 2_097_779u64);
        // Spot-check primality of both by trial division; they are 21/22 bits.
        for n in [1_048_889u64, 2_097_779u64] {
            let mut d = 2u64;
            while d * d <= n {
                assert_ne!(n % d, 0, "{n} divisible by {d}");
                d += 1;
            }
        }
        // And the generator really has order Q, not 1, 2, or 2Q.
        assert_eq!(powmod(4, 1_048_889, 2_097_779), 1);
        assert_ne!(powmod(4, 2, 2_097_779), 1);
    }

    #[test]
    fn off_subgroup_values_rejected() {
        // 2 generates the full 2Q group mod 2097779, so it is not in the
        // order-Q subgroup.
        let bytes = 2u64.to_be_bytes();
        assert!(matches!(
            <TinyGroup as Group>::Point::from_bytes(&bytes),
            Err(DecodeError::OffGroup)
        ));
        let zero = 0u64.to_be_bytes();
        assert!(matches!(
            <TinyGroup as Group>::Point::from_bytes(&zero),
            Err(DecodeError::OffGroup)
        ));
    }
}
