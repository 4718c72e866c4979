//! secp256k1 backend (production profile).
//!
//! Scalars encode as 32-byte big-endian integers `< q`. Points encode as
//! 33-byte SEC1 compressed form; the identity is the all-zero 33-byte string,
//! which is not a valid SEC1 encoding and therefore unambiguous.

use k256::elliptic_curve::bigint::Encoding;
use k256::elliptic_curve::ops::Reduce;
use k256::elliptic_curve::point::AffineCoordinates;
use k256::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use k256::elliptic_curve::{Curve, PrimeField};
use k256::{AffinePoint, EncodedPoint, FieldBytes, ProjectivePoint, Secp256k1, U256};
use num_bigint::BigUint;

use super::{hash_transcript, DecodeError, Group, PointElement, ScalarElement};

const SCALAR_BYTES: usize = 32;
const POINT_BYTES: usize = 33;

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SecpScalar(k256::Scalar);

impl core::fmt::Debug for SecpScalar {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "SecpScalar({})", hex::encode(self.to_bytes()))
    }
}

impl ScalarElement for SecpScalar {
    fn zero() -> Self {
        SecpScalar(k256::Scalar::ZERO)
    }
    fn one() -> Self {
        SecpScalar(k256::Scalar::ONE)
    }
    fn from_u64(v: u64) -> Self {
        SecpScalar(k256::Scalar::from(v))
    }
    fn add(&self, rhs: &Self) -> Self {
        SecpScalar(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        SecpScalar(self.0 - rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        SecpScalar(self.0 * rhs.0)
    }
    fn neg(&self) -> Self {
        SecpScalar(-self.0)
    }
    fn invert(&self) -> Option<Self> {
        Option::<k256::Scalar>::from(self.0.invert()).map(SecpScalar)
    }
    fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes().to_vec()
    }
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        if bytes.len() != SCALAR_BYTES {
            return Err(DecodeError::Length { expected: SCALAR_BYTES, got: bytes.len() });
        }
        let arr: [u8; SCALAR_BYTES] = bytes.try_into().expect("length checked");
        Option::<k256::Scalar>::from(k256::Scalar::from_repr(FieldBytes::from(arr)))
            .map(SecpScalar)
            .ok_or(DecodeError::UnreducedScalar)
    }
}

#[derive(Clone, Copy)]
pub struct SecpPoint(ProjectivePoint);

impl PartialEq for SecpPoint {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for SecpPoint {}

impl core::fmt::Debug for SecpPoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "SecpPoint({})", hex::encode(self.to_bytes()))
    }
}

impl PointElement for SecpPoint {
    type Scalar = SecpScalar;

    fn generator() -> Self {
        SecpPoint(ProjectivePoint::GENERATOR)
    }
    fn identity() -> Self {
        SecpPoint(ProjectivePoint::IDENTITY)
    }
    fn add(&self, rhs: &Self) -> Self {
        SecpPoint(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        SecpPoint(self.0 - rhs.0)
    }
    fn mul(&self, k: &Self::Scalar) -> Self {
        SecpPoint(self.0 * k.0)
    }
    fn to_bytes(&self) -> Vec<u8> {
        if self.0 == ProjectivePoint::IDENTITY {
            return vec![0u8; POINT_BYTES];
        }
        self.0.to_affine().to_encoded_point(true).as_bytes().to_vec()
    }
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        if bytes.len() != POINT_BYTES {
            return Err(DecodeError::Length { expected: POINT_BYTES, got: bytes.len() });
        }
        if bytes.iter().all(|&b| b == 0) {
            return Ok(Self::identity());
        }
        if bytes[0] != 0x02 && bytes[0] != 0x03 {
            return Err(DecodeError::BadTag);
        }
        let encoded = EncodedPoint::from_bytes(bytes).map_err(|_| DecodeError::OffGroup)?;
        Option::<AffinePoint>::from(AffinePoint::from_encoded_point(&encoded))
            .map(|a| SecpPoint(ProjectivePoint::from(a)))
            .ok_or(DecodeError::OffGroup)
    }
}

/// The production group profile: secp256k1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Secp256k1Group;

impl Group for Secp256k1Group {
    type Scalar = SecpScalar;
    type Point = SecpPoint;

    const ID: &'static str = "secp256k1";
    const SCALAR_BYTES: usize = SCALAR_BYTES;
    const POINT_BYTES: usize = POINT_BYTES;

    fn order() -> BigUint {
        BigUint::from_bytes_be(&Secp256k1::ORDER.to_be_bytes())
    }

    fn coord_scalar(p: &Self::Point) -> Self::Scalar {
        let x = p.0.to_affine().x();
        SecpScalar(<k256::Scalar as Reduce<U256>>::reduce_bytes(&x))
    }

    fn hash_to_scalar(tag: &str, parts: &[&[u8]]) -> Self::Scalar {
        let digest = hash_transcript(tag, parts);
        SecpScalar(<k256::Scalar as Reduce<U256>>::reduce_bytes(&FieldBytes::from(digest)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_the_secp256k1_group_order() {
        let expected = BigUint::parse_bytes(
            b"fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141",
            16,
        )
        .unwrap();
        assert_eq!(Secp256k1Group::order(), expected);
    }

    #[test]
    fn identity_encoding_is_all_zero() {
        let id = SecpPoint::identity();
        assert_eq!(id.to_bytes(), vec![0u8; 33]);
        assert!(id.is_identity());
    }

    #[test]
    fn rejects_uncompressed_tag() {
        let mut bytes = SecpPoint::generator().to_bytes();
        bytes[0] = 0x04;
        assert!(matches!(SecpPoint::from_bytes(&bytes), Err(DecodeError::BadTag)));
    }

    #[test]
    fn coord_scalar_of_generator_matches_known_x() {
        // x(G) for secp256k1 is below q, so the reduction is the identity map.
        let x = BigUint::parse_bytes(
            b"79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798",
            16,
        )
        .unwrap();
        let got = Secp256k1Group::coord_scalar(&SecpPoint::generator());
        assert_eq!(BigUint::from_bytes_be(&got.to_bytes()), x);
    }
}
