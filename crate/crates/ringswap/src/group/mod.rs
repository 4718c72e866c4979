//! Prime-order group abstraction shared by every signing scheme in this crate.
//!
//! Two backends implement [`Group`]:
//!
//! * [`secp::Secp256k1Group`]: the production profile, secp256k1 via `k256`.
//! * [`tiny::Schoolbook`]: a multiplicative subgroup of prime order `q`
//!   inside `Z_p*`, small enough that protocol algebra can be cross-checked
//!   against brute-force oracles.
//!
//! All byte encodings are canonical and fixed-length: scalars are big-endian
//! integers padded to [`Group::SCALAR_BYTES`], points use the backend's
//! documented encoding padded to [`Group::POINT_BYTES`] (see each backend).
//! Decoding rejects unreduced scalars and off-group points.

pub mod secp;
pub mod tiny;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Decoding failures for canonical scalar/point encodings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("scalar not in canonical reduced form")]
    UnreducedScalar,
    #[error("point is not on the group")]
    OffGroup,
    #[error("invalid encoding tag")]
    BadTag,
}

/// Scalar field element of a prime-order group; arithmetic is mod the group
/// order `q`.
pub trait ScalarElement:
    Sized + Clone + PartialEq + Eq + core::fmt::Debug + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn invert(&self) -> Option<Self>;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    /// Canonical fixed-length big-endian encoding.
    fn to_bytes(&self) -> Vec<u8>;
    /// Rejects wrong lengths and values `>= q`.
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError>;
}

/// Group element; supports the identity.
pub trait PointElement:
    Sized + Clone + PartialEq + Eq + core::fmt::Debug + Send + Sync + 'static
{
    type Scalar: ScalarElement;

    fn generator() -> Self;
    fn identity() -> Self;
    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, k: &Self::Scalar) -> Self;
    /// Canonical fixed-length encoding.
    fn to_bytes(&self) -> Vec<u8>;
    /// Rejects wrong lengths and off-group values.
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError>;
}

/// A concrete prime-order group profile.
pub trait Group: Clone + core::fmt::Debug + Send + Sync + 'static {
    type Scalar: ScalarElement;
    type Point: PointElement<Scalar = Self::Scalar>;

    /// Short profile tag used in configs and transcript headers.
    const ID: &'static str;
    const SCALAR_BYTES: usize;
    const POINT_BYTES: usize;

    /// The group order `q`.
    fn order() -> BigUint;

    /// Folds a point's canonical coordinate into the scalar field (the
    /// `x`-coordinate reduced mod `q` for curve backends).
    fn coord_scalar(p: &Self::Point) -> Self::Scalar;

    /// Domain-separated, length-prefixed transcript hash reduced into the
    /// scalar field.
    fn hash_to_scalar(tag: &str, parts: &[&[u8]]) -> Self::Scalar;

    /// Deterministic scalar derivation from a seed. Same seed, same scalar.
    fn scalar_from_seed(seed: &[u8]) -> Self::Scalar {
        assert!(!seed.is_empty(), "seed must be non-empty");
        Self::hash_to_scalar("rand/v1", &[seed])
    }

    fn description() -> GroupDescription {
        GroupDescription {
            id: Self::ID.to_string(),
            order: Self::order(),
            generator: Self::Point::generator().to_bytes(),
        }
    }
}

/// Public parameters of a group profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescription {
    pub id: String,
    pub order: BigUint,
    /// Canonical encoding of the generator.
    pub generator: Vec<u8>,
}

/// SHA-256 transcript over a domain tag and parts. Every component is
/// length-prefixed (u32 big-endian) and the part count is included, so part
/// boundaries cannot be reshuffled without changing the digest.
pub fn hash_transcript(tag: &str, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((tag.len() as u32).to_be_bytes());
    h.update(tag.as_bytes());
    h.update((parts.len() as u32).to_be_bytes());
    for part in parts {
        h.update((part.len() as u32).to_be_bytes());
        h.update(part);
    }
    h.finalize().into()
}

/// Derives an independent sub-seed from a master seed, a label, and an index.
pub fn derive_seed(master: &[u8], label: &str, index: u64) -> Vec<u8> {
    hash_transcript("seed/v1", &[master, label.as_bytes(), &index.to_be_bytes()]).to_vec()
}
