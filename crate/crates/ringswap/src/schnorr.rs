//! Schnorr-style adaptor signatures with a shared adaptor point.
//!
//! Every party pre-signs its own payment message against the same adaptor
//! point `T = tG`. A pre-signature carries `s' = r + c*a` and verifies as
//! `s'G == R + c*A`; completing it means adding the adaptor secret,
//! `s = s' + t`, after which it verifies as `sG == R + T + c*A`. Anyone who
//! sees both halves recovers `t = s - s'`, which is what makes one published
//! completion unlock every other pre-signature in the batch.
//!
//! Challenges come in two shapes. `Direct` binds the combined nonce, the
//! signer key and the message; `Accumulated` additionally binds the digests
//! of the key and message accumulators shared by the whole batch. The two
//! shapes can never collide because the transcript hash commits to the part
//! count.

use crate::group::{DecodeError, Group, PointElement, ScalarElement};

const CHALLENGE_TAG: &str = "swap/challenge/v1";

/// Index of a party within a swap, used to bind signatures to positions.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PartyId(pub u32);

impl PartyId {
    pub fn to_bytes(self) -> [u8; 4] {
        self.0.to_be_bytes()
    }
}

/// Long-term signing key.
#[derive(Clone)]
pub struct KeyPair<G: Group> {
    sk: G::Scalar,
    pk: G::Point,
}

impl<G: Group> KeyPair<G> {
    pub fn generate(seed: &[u8]) -> Self {
        let sk = G::scalar_from_seed(seed);
        let pk = G::Point::generator().mul(&sk);
        KeyPair { sk, pk }
    }

    pub fn from_secret(sk: G::Scalar) -> Self {
        let pk = G::Point::generator().mul(&sk);
        KeyPair { sk, pk }
    }

    pub fn public(&self) -> &G::Point {
        &self.pk
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.sk
    }
}

/// One-shot signing nonce. `pre_sign` consumes it so a pair can never sign
/// two different challenges.
pub struct NoncePair<G: Group> {
    r: G::Scalar,
    big_r: G::Point,
}

impl<G: Group> NoncePair<G> {
    pub fn generate(seed: &[u8]) -> Self {
        let r = G::scalar_from_seed(seed);
        let big_r = G::Point::generator().mul(&r);
        NoncePair { r, big_r }
    }

    pub fn public(&self) -> &G::Point {
        &self.big_r
    }
}

/// The adaptor secret `t` with its public point `T = tG`. One instance is
/// shared across all parties of a swap.
#[derive(Clone)]
pub struct AdaptorSecret<G: Group> {
    t: G::Scalar,
    big_t: G::Point,
}

impl<G: Group> AdaptorSecret<G> {
    pub fn generate(seed: &[u8]) -> Self {
        let t = G::scalar_from_seed(seed);
        let big_t = G::Point::generator().mul(&t);
        AdaptorSecret { t, big_t }
    }

    pub fn public(&self) -> &G::Point {
        &self.big_t
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.t
    }
}

/// Challenge transcript shape.
#[derive(Clone, Copy, Debug)]
pub enum ChallengeMode<'a> {
    /// Two-party form: bind combined nonce, signer key, message.
    Direct,
    /// Batch form: additionally bind the key and message accumulator digests.
    Accumulated {
        keys_digest: &'a [u8],
        msgs_digest: &'a [u8],
    },
}

/// Fiat-Shamir challenge `c`. `combined_nonce` is `R + T`.
pub fn compute_challenge<G: Group>(
    mode: ChallengeMode<'_>,
    combined_nonce: &G::Point,
    pk: &G::Point,
    msg: &[u8],
) -> G::Scalar {
    let rn = combined_nonce.to_bytes();
    let pkb = pk.to_bytes();
    match mode {
        ChallengeMode::Direct => G::hash_to_scalar(CHALLENGE_TAG, &[&rn, &pkb, msg]),
        ChallengeMode::Accumulated { keys_digest, msgs_digest } => {
            G::hash_to_scalar(CHALLENGE_TAG, &[&rn, &pkb, keys_digest, msgs_digest, msg])
        }
    }
}

macro_rules! sig_struct {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub struct $name<G: Group> {
            pub party: PartyId,
            pub challenge: G::Scalar,
            pub s: G::Scalar,
            pub nonce_point: G::Point,
            pub adaptor_point: G::Point,
        }

        impl<G: Group> PartialEq for $name<G> {
            fn eq(&self, other: &Self) -> bool {
                self.party == other.party
                    && self.challenge == other.challenge
                    && self.s == other.s
                    && self.nonce_point == other.nonce_point
                    && self.adaptor_point == other.adaptor_point
            }
        }
        impl<G: Group> Eq for $name<G> {}
    };
}

sig_struct! {
    /// A pre-signature: everything of a signature except the adaptor secret.
    PreSignature
}

sig_struct! {
    /// A completed signature, valid under the chain rule
    /// `sG == R + T + c*pk`.
    FullSignature
}

fn encode_parts<G: Group>(
    party: PartyId,
    challenge: &G::Scalar,
    s: &G::Scalar,
    nonce_point: &G::Point,
    adaptor_point: &G::Point,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 2 * G::SCALAR_BYTES + 2 * G::POINT_BYTES);
    out.extend_from_slice(&party.to_bytes());
    out.extend_from_slice(&challenge.to_bytes());
    out.extend_from_slice(&s.to_bytes());
    out.extend_from_slice(&nonce_point.to_bytes());
    out.extend_from_slice(&adaptor_point.to_bytes());
    out
}

fn decode_parts<G: Group>(
    bytes: &[u8],
) -> Result<(PartyId, G::Scalar, G::Scalar, G::Point, G::Point), DecodeError> {
    let expected = 4 + 2 * G::SCALAR_BYTES + 2 * G::POINT_BYTES;
    if bytes.len() != expected {
        return Err(DecodeError::Length { expected, got: bytes.len() });
    }
    let party = PartyId(u32::from_be_bytes(bytes[0..4].try_into().unwrap()));
    let mut at = 4;
    let challenge = G::Scalar::from_bytes(&bytes[at..at + G::SCALAR_BYTES])?;
    at += G::SCALAR_BYTES;
    let s = G::Scalar::from_bytes(&bytes[at..at + G::SCALAR_BYTES])?;
    at += G::SCALAR_BYTES;
    let nonce_point = G::Point::from_bytes(&bytes[at..at + G::POINT_BYTES])?;
    at += G::POINT_BYTES;
    let adaptor_point = G::Point::from_bytes(&bytes[at..at + G::POINT_BYTES])?;
    Ok((party, challenge, s, nonce_point, adaptor_point))
}

impl<G: Group> PreSignature<G> {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode_parts::<G>(self.party, &self.challenge, &self.s, &self.nonce_point, &self.adaptor_point)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (party, challenge, s, nonce_point, adaptor_point) = decode_parts::<G>(bytes)?;
        Ok(PreSignature { party, challenge, s, nonce_point, adaptor_point })
    }
}

impl<G: Group> FullSignature<G> {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode_parts::<G>(self.party, &self.challenge, &self.s, &self.nonce_point, &self.adaptor_point)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (party, challenge, s, nonce_point, adaptor_point) = decode_parts::<G>(bytes)?;
        Ok(FullSignature { party, challenge, s, nonce_point, adaptor_point })
    }
}

/// Produce `s' = r + c*a`. The nonce is consumed.
pub fn pre_sign<G: Group>(
    party: PartyId,
    keypair: &KeyPair<G>,
    nonce: NoncePair<G>,
    adaptor_point: &G::Point,
    challenge: &G::Scalar,
) -> PreSignature<G> {
    let s = nonce.r.add(&challenge.mul(&keypair.sk));
    PreSignature {
        party,
        challenge: challenge.clone(),
        s,
        nonce_point: nonce.big_r,
        adaptor_point: adaptor_point.clone(),
    }
}

/// Check `s'G == R + c*pk`. Callers that care about the challenge itself
/// must recompute it with [`compute_challenge`] and compare.
pub fn pre_verify<G: Group>(presig: &PreSignature<G>, pk: &G::Point) -> bool {
    let lhs = G::Point::generator().mul(&presig.s);
    let rhs = presig.nonce_point.add(&pk.mul(&presig.challenge));
    lhs == rhs
}

/// Complete a pre-signature: `s = s' + t`.
pub fn adapt<G: Group>(presig: &PreSignature<G>, t: &G::Scalar) -> FullSignature<G> {
    FullSignature {
        party: presig.party,
        challenge: presig.challenge.clone(),
        s: presig.s.add(t),
        nonce_point: presig.nonce_point.clone(),
        adaptor_point: presig.adaptor_point.clone(),
    }
}

/// Check `sG == R + T + c*pk`.
pub fn verify_full<G: Group>(sig: &FullSignature<G>, pk: &G::Point) -> bool {
    let lhs = G::Point::generator().mul(&sig.s);
    let rhs = sig
        .nonce_point
        .add(&sig.adaptor_point)
        .add(&pk.mul(&sig.challenge));
    lhs == rhs
}

/// Recover `t = s - s'` from a completed signature and its pre-signature.
/// Returns `None` when the pair does not line up or the difference does not
/// open the adaptor point.
pub fn extract_secret<G: Group>(
    sig: &FullSignature<G>,
    presig: &PreSignature<G>,
) -> Option<G::Scalar> {
    if sig.party != presig.party
        || sig.nonce_point != presig.nonce_point
        || sig.adaptor_point != presig.adaptor_point
        || sig.challenge != presig.challenge
    {
        return None;
    }
    let t = sig.s.sub(&presig.s);
    if G::Point::generator().mul(&t) != presig.adaptor_point {
        return None;
    }
    Some(t)
}
