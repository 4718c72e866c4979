//! ECDSA-based adaptor signatures.
//!
//! The signer runs ECDSA with its nonce point taken on the statement `Y`
//! instead of the generator: `r = f(kY)`, `s_hat = k^-1 (h(m) + r x)`. A
//! pre-signature ships `Z = xY` with a Chaum-Pedersen proof that `Z` and the
//! public key share the discrete log `x`, which is what lets anyone verify
//! the pre-signature without the witness. Completing with witness `y`
//! divides it out, `s = s_hat * y^-1`, and the result is a plain ECDSA
//! signature because the implicit nonce becomes `s^-1 (h + r x) G = y k G`
//! whose x-coordinate is exactly `f(kY)`. Whoever sees both halves recovers
//! `y = s_hat / s`.

use crate::group::{Group, PointElement, ScalarElement};

const DLEQ_TAG: &str = "dleq/v1";
const POK_TAG: &str = "pok/v1";
const MSG_TAG: &str = "ecdsa/msg/v1";
const NONCE_TAG: &str = "ecdsa/nonce/v1";

/// `h(m)`: tagged hash of the message, reduced to a scalar.
pub fn message_scalar<G: Group>(msg: &[u8]) -> G::Scalar {
    G::hash_to_scalar(MSG_TAG, &[msg])
}

/// Chaum-Pedersen proof that `pk = x G` and `z = x Y` share `x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DleqProof<G: Group> {
    pub a1: G::Point,
    pub a2: G::Point,
    pub z: G::Scalar,
}

fn dleq_challenge<G: Group>(
    pk: &G::Point,
    statement: &G::Point,
    z_point: &G::Point,
    a1: &G::Point,
    a2: &G::Point,
) -> G::Scalar {
    G::hash_to_scalar(
        DLEQ_TAG,
        &[
            &pk.to_bytes(),
            &statement.to_bytes(),
            &z_point.to_bytes(),
            &a1.to_bytes(),
            &a2.to_bytes(),
        ],
    )
}

pub fn prove_dleq<G: Group>(
    x: &G::Scalar,
    statement: &G::Point,
    seed: &[u8],
) -> (G::Point, DleqProof<G>) {
    let z_point = statement.mul(x);
    let w = G::scalar_from_seed(seed);
    let a1 = G::Point::generator().mul(&w);
    let a2 = statement.mul(&w);
    let pk = G::Point::generator().mul(x);
    let c = dleq_challenge::<G>(&pk, statement, &z_point, &a1, &a2);
    let z = w.add(&c.mul(x));
    (z_point, DleqProof { a1, a2, z })
}

pub fn verify_dleq<G: Group>(
    pk: &G::Point,
    statement: &G::Point,
    z_point: &G::Point,
    proof: &DleqProof<G>,
) -> bool {
    let c = dleq_challenge::<G>(pk, statement, z_point, &proof.a1, &proof.a2);
    let lhs1 = G::Point::generator().mul(&proof.z);
    let rhs1 = proof.a1.add(&pk.mul(&c));
    let lhs2 = statement.mul(&proof.z);
    let rhs2 = proof.a2.add(&z_point.mul(&c));
    lhs1 == rhs1 && lhs2 == rhs2
}

/// Schnorr proof of knowledge of a discrete log, for announcing statement
/// points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DlogProof<G: Group> {
    pub a: G::Point,
    pub z: G::Scalar,
}

pub fn prove_dlog<G: Group>(secret: &G::Scalar, seed: &[u8]) -> DlogProof<G> {
    let w = G::scalar_from_seed(seed);
    let a = G::Point::generator().mul(&w);
    let point = G::Point::generator().mul(secret);
    let c = G::hash_to_scalar(POK_TAG, &[&point.to_bytes(), &a.to_bytes()]);
    DlogProof { a, z: w.add(&c.mul(secret)) }
}

pub fn verify_dlog<G: Group>(point: &G::Point, proof: &DlogProof<G>) -> bool {
    let c = G::hash_to_scalar(POK_TAG, &[&point.to_bytes(), &proof.a.to_bytes()]);
    G::Point::generator().mul(&proof.z) == proof.a.add(&point.mul(&c))
}

/// ECDSA pre-signature with respect to a statement point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EcdsaPreSignature<G: Group> {
    pub r: G::Scalar,
    pub s_hat: G::Scalar,
    pub z_point: G::Point,
    pub dleq: DleqProof<G>,
}

/// Plain ECDSA signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EcdsaSignature<G: Group> {
    pub r: G::Scalar,
    pub s: G::Scalar,
}

/// Pre-sign `msg` under `keypair` against statement `y_point`. The nonce is
/// derived from `seed` and a retry counter, so identical inputs produce
/// identical pre-signatures.
pub fn p_sign<G: Group>(
    keypair: &crate::schnorr::KeyPair<G>,
    y_point: &G::Point,
    msg: &[u8],
    seed: &[u8],
) -> EcdsaPreSignature<G> {
    assert!(!y_point.is_identity(), "statement point must not be the identity");
    let h = message_scalar::<G>(msg);
    for ctr in 0u64.. {
        let k = G::hash_to_scalar(NONCE_TAG, &[seed, &ctr.to_be_bytes(), b"k"]);
        let Some(k_inv) = k.invert() else { continue };
        let r = G::coord_scalar(&y_point.mul(&k));
        if r.is_zero() {
            continue;
        }
        let s_hat = k_inv.mul(&h.add(&r.mul(keypair.secret())));
        if s_hat.is_zero() {
            continue;
        }
        let dleq_seed = [seed, &ctr.to_be_bytes(), b"dleq"].concat();
        let (z_point, dleq) = prove_dleq::<G>(keypair.secret(), y_point, &dleq_seed);
        return EcdsaPreSignature { r, s_hat, z_point, dleq };
    }
    unreachable!("nonce space exhausted");
}

/// Verify a pre-signature: the DLEQ ties `z_point` to the key, and the
/// recomputed nonce point must reproduce `r`.
pub fn p_vrfy<G: Group>(
    pk: &G::Point,
    y_point: &G::Point,
    msg: &[u8],
    pre: &EcdsaPreSignature<G>,
) -> bool {
    if pre.r.is_zero() || pre.s_hat.is_zero() {
        return false;
    }
    if !verify_dleq::<G>(pk, y_point, &pre.z_point, &pre.dleq) {
        return false;
    }
    let Some(s_inv) = pre.s_hat.invert() else {
        return false;
    };
    let h = message_scalar::<G>(msg);
    let u1 = s_inv.mul(&h);
    let u2 = s_inv.mul(&pre.r);
    let candidate = y_point.mul(&u1).add(&pre.z_point.mul(&u2));
    G::coord_scalar(&candidate) == pre.r
}

/// Complete a pre-signature with the witness `y`.
pub fn adapt<G: Group>(pre: &EcdsaPreSignature<G>, y: &G::Scalar) -> Option<EcdsaSignature<G>> {
    let y_inv = y.invert()?;
    Some(EcdsaSignature { r: pre.r.clone(), s: pre.s_hat.mul(&y_inv) })
}

/// Recover the witness from a completed signature and its pre-signature.
/// Returns `None` unless the recovered value actually opens `y_point`.
pub fn ext<G: Group>(
    sig: &EcdsaSignature<G>,
    pre: &EcdsaPreSignature<G>,
    y_point: &G::Point,
) -> Option<G::Scalar> {
    let s_inv = sig.s.invert()?;
    let y = pre.s_hat.mul(&s_inv);
    if G::Point::generator().mul(&y) != *y_point {
        return None;
    }
    Some(y)
}

/// Textbook ECDSA verification.
pub fn verify<G: Group>(pk: &G::Point, msg: &[u8], sig: &EcdsaSignature<G>) -> bool {
    if sig.r.is_zero() || sig.s.is_zero() {
        return false;
    }
    let Some(w) = sig.s.invert() else {
        return false;
    };
    let h = message_scalar::<G>(msg);
    let u1 = w.mul(&h);
    let u2 = w.mul(&sig.r);
    let point = G::Point::generator().mul(&u1).add(&pk.mul(&u2));
    if point.is_identity() {
        return false;
    }
    G::coord_scalar(&point) == sig.r
}
