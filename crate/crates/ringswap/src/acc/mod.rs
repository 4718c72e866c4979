//! RSA multiset accumulator over the quotient group `Z_N^* / {+-1}`.
//!
//! Elements map to primes through [`prime::hash_to_prime`]; the digest of a
//! multiset is `g` raised to the product of those primes (with
//! multiplicity). Working in the quotient group, with every value reduced to
//! its canonical representative in `[1, (N-1)/2]`, removes the order-2
//! subgroup that would otherwise let an adversary flip signs of witnesses.
//!
//! Supported proofs:
//! * membership: cofactor witness `w` with `w^H(e) == d`,
//! * non-membership: Bezout pair `(a, B)` with `d^a * B^H(e) == g`,
//! * batched updates: Wesolowski proofs of exponentiation, which keep the
//!   verifier's group work at two short exponentiations no matter how many
//!   elements a batch touches,
//! * MultiSwap: a removal batch chained with an insertion batch, one proof
//!   each, sharing the intermediate digest.

pub mod prime;
pub mod script;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use prime::{hash_to_prime, is_probable_prime};
pub use script::AccOp;

const ELEM_TAG: &str = "acc/elem/v1";
const POE_TAG: &str = "poe/v1";

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum AccError {
    #[error("element not present with required multiplicity: {0}")]
    NotPresent(String),
    #[error("element is present, so no non-membership proof exists: {0}")]
    Present(String),
    #[error("value is not a canonical accumulator element")]
    BadElement,
}

fn label(elem: &[u8]) -> String {
    String::from_utf8_lossy(elem).into_owned()
}

/// Public parameters: RSA modulus, quotient-group generator, and the prime
/// mapping width. Nobody may know the factorization of `n`; the simulator
/// generates it from a seed and forgets the factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaParams {
    n: BigUint,
    g: BigUint,
    pub prime_bits: u32,
    pub mr_rounds: u32,
}

impl RsaParams {
    pub fn new(
        n: impl Into<BigUint>,
        g: impl Into<BigUint>,
        prime_bits: u32,
        mr_rounds: u32,
    ) -> Self {
        let n = n.into();
        assert!(n.bits() >= 6, "modulus too small");
        assert!(n.is_odd(), "modulus must be odd");
        let g = canon(&g.into(), &n);
        assert!(!g.is_zero() && !g.is_one(), "generator must be a nontrivial unit");
        RsaParams { n, g, prime_bits, mr_rounds }
    }

    /// Deterministically sample a fresh modulus from a seed. The factors are
    /// dropped on the floor, which is as close to a trusted setup as a
    /// simulator gets.
    pub fn generate(seed: &[u8], modulus_bits: u32, prime_bits: u32, mr_rounds: u32) -> Self {
        assert!(modulus_bits >= 16 && modulus_bits % 2 == 0);
        let mut key = [0u8; 32];
        let mut h = Sha256::new();
        h.update(b"acc/setup/v1");
        h.update((modulus_bits as u64).to_be_bytes());
        h.update(seed);
        key.copy_from_slice(&h.finalize());
        let mut rng = ChaCha20Rng::from_seed(key);

        let half = modulus_bits / 2;
        let p = gen_prime(&mut rng, half, mr_rounds);
        let mut q = gen_prime(&mut rng, half, mr_rounds);
        while q == p {
            q = gen_prime(&mut rng, half, mr_rounds);
        }
        let n = &p * &q;

        let mut g = BigUint::from(3u32);
        while n.gcd(&g) != BigUint::one() {
            g += 2u32;
        }
        RsaParams::new(n, g, prime_bits, mr_rounds)
    }

    /// Small parameters for fast simulation: 64-bit modulus, 32-bit primes.
    pub fn toy(seed: &[u8]) -> Self {
        RsaParams::generate(seed, 64, 32, 20)
    }

    /// Production-shaped parameters: 2048-bit modulus, 128-bit primes.
    pub fn realistic(seed: &[u8]) -> Self {
        RsaParams::generate(seed, 2048, 128, 20)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn modulus_bytes(&self) -> usize {
        self.n.bits().div_ceil(8) as usize
    }

    /// The prime representative of an element.
    pub fn element_prime(&self, elem: &[u8]) -> BigUint {
        hash_to_prime(ELEM_TAG, &[elem], self.prime_bits, self.mr_rounds)
    }
}

fn gen_prime(rng: &mut ChaCha20Rng, bits: u32, mr_rounds: u32) -> BigUint {
    let one = BigUint::one();
    loop {
        let mut cand = rng.gen_biguint(bits as u64);
        // Top two bits set so the product of two such primes has full width.
        cand |= &one << (bits - 1);
        cand |= &one << (bits - 2);
        cand |= &one;
        if is_probable_prime(&cand, mr_rounds) {
            return cand;
        }
    }
}

fn canon(v: &BigUint, n: &BigUint) -> BigUint {
    let v = v % n;
    let flip = n - &v;
    if flip < v {
        flip
    } else {
        v
    }
}

/// Element of `Z_N^* / {+-1}` held as its canonical representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QrElement(BigUint);

impl QrElement {
    pub fn new(v: impl Into<BigUint>, params: &RsaParams) -> Self {
        let c = canon(&v.into(), &params.n);
        assert!(!c.is_zero(), "zero is not a group element");
        QrElement(c)
    }

    pub fn generator(params: &RsaParams) -> Self {
        QrElement(params.g.clone())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn mul(&self, params: &RsaParams, rhs: &QrElement) -> QrElement {
        QrElement(canon(&(&self.0 * &rhs.0 % &params.n), &params.n))
    }

    pub fn pow(&self, params: &RsaParams, e: &BigUint) -> QrElement {
        QrElement(canon(&self.0.modpow(e, &params.n), &params.n))
    }

    pub fn inverse(&self, params: &RsaParams) -> Option<QrElement> {
        self.0.modinv(&params.n).map(|v| QrElement(canon(&v, &params.n)))
    }

    /// Exponentiation with a possibly negative exponent.
    pub fn pow_signed(&self, params: &RsaParams, e: &BigInt) -> Option<QrElement> {
        let mag = e.magnitude();
        if e.sign() == Sign::Minus {
            Some(self.inverse(params)?.pow(params, mag))
        } else {
            Some(self.pow(params, mag))
        }
    }

    /// Fixed-width big-endian encoding (modulus width).
    pub fn to_bytes(&self, params: &RsaParams) -> Vec<u8> {
        let mut out = vec![0u8; params.modulus_bytes()];
        let raw = self.0.to_bytes_be();
        let at = out.len() - raw.len();
        out[at..].copy_from_slice(&raw);
        out
    }

    pub fn from_bytes(params: &RsaParams, bytes: &[u8]) -> Result<Self, AccError> {
        if bytes.len() != params.modulus_bytes() {
            return Err(AccError::BadElement);
        }
        let v = BigUint::from_bytes_be(bytes);
        if v.is_zero() || v != canon(&v, &params.n) || params.n.gcd(&v) != BigUint::one() {
            return Err(AccError::BadElement);
        }
        Ok(QrElement(v))
    }
}

/// Cofactor witness: `w = g` raised to the product of all primes except one
/// copy of the proven element's.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MembershipWitness {
    pub cofactor: QrElement,
}

/// Bezout witness `(a, B)` for `a*x_star + b*H(e) = 1`, shipped as the
/// coefficient `a` and the group element `B = g^b`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonMembershipWitness {
    pub a: BigInt,
    pub b_elem: QrElement,
}

/// Wesolowski proof that `result == base^x` for a product exponent `x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoeProof {
    pub q: QrElement,
}

/// Verifier verdict plus the total bit length of the group exponents it
/// actually raised to, which is the quantity the batching bounds.
#[derive(Clone, Copy, Debug)]
pub struct PoeOutcome {
    pub valid: bool,
    pub exponent_bits: u64,
}

/// One batched accumulator update with its proof.
#[derive(Clone, Debug)]
pub struct BatchUpdate {
    pub old_digest: QrElement,
    pub new_digest: QrElement,
    pub proof: PoeProof,
}

/// A MultiSwap: remove a batch, insert a batch, two chained proofs.
#[derive(Clone, Debug)]
pub struct MultiSwapUpdate {
    pub old_digest: QrElement,
    pub mid_digest: QrElement,
    pub new_digest: QrElement,
    pub remove_proof: PoeProof,
    pub insert_proof: PoeProof,
}

fn poe_challenge(
    params: &RsaParams,
    base: &QrElement,
    result: &QrElement,
    elems: &[Vec<u8>],
) -> BigUint {
    let mut hashes: Vec<[u8; 32]> = elems
        .iter()
        .map(|e| {
            let mut h = Sha256::new();
            h.update(e);
            h.finalize().into()
        })
        .collect();
    hashes.sort_unstable();
    let base_b = base.to_bytes(params);
    let result_b = result.to_bytes(params);
    let mut parts: Vec<&[u8]> = Vec::with_capacity(2 + hashes.len());
    parts.push(&base_b);
    parts.push(&result_b);
    for h in &hashes {
        parts.push(h);
    }
    hash_to_prime(POE_TAG, &parts, params.prime_bits, params.mr_rounds)
}

fn batch_product(params: &RsaParams, elems: &[Vec<u8>]) -> BigUint {
    elems
        .iter()
        .fold(BigUint::one(), |acc, e| acc * params.element_prime(e))
}

/// Prove `base^(product of element primes) == result`.
pub fn prove_poe(
    params: &RsaParams,
    base: &QrElement,
    result: &QrElement,
    elems: &[Vec<u8>],
) -> PoeProof {
    let x = batch_product(params, elems);
    let ell = poe_challenge(params, base, result, elems);
    let q = &x / &ell;
    PoeProof { q: base.pow(params, &q) }
}

/// Verify a proof of exponentiation. The verifier never forms the full
/// product exponent; it folds each element prime modulo the challenge.
pub fn verify_poe(
    params: &RsaParams,
    base: &QrElement,
    result: &QrElement,
    elems: &[Vec<u8>],
    proof: &PoeProof,
) -> PoeOutcome {
    let ell = poe_challenge(params, base, result, elems);
    let rem = elems.iter().fold(BigUint::one(), |acc, e| {
        acc * (params.element_prime(e) % &ell) % &ell
    });
    let exponent_bits = ell.bits() + rem.bits();
    let lhs = proof.q.pow(params, &ell).mul(params, &base.pow(params, &rem));
    PoeOutcome { valid: lhs == *result, exponent_bits }
}

/// Verify a batched insertion `old -> new`.
pub fn verify_batch_insert(
    params: &RsaParams,
    old: &QrElement,
    new: &QrElement,
    inserted: &[Vec<u8>],
    proof: &PoeProof,
) -> PoeOutcome {
    verify_poe(params, old, new, inserted, proof)
}

/// Verify a batched removal `old -> new`; the exponent relation runs in the
/// other direction, `new^x == old`.
pub fn verify_batch_remove(
    params: &RsaParams,
    old: &QrElement,
    new: &QrElement,
    removed: &[Vec<u8>],
    proof: &PoeProof,
) -> PoeOutcome {
    verify_poe(params, new, old, removed, proof)
}

/// Verify both halves of a MultiSwap. Valid only if both proofs check out;
/// exponent bits accumulate across the two.
pub fn verify_multi_swap(
    params: &RsaParams,
    update: &MultiSwapUpdate,
    removals: &[Vec<u8>],
    insertions: &[Vec<u8>],
) -> PoeOutcome {
    let rm = verify_batch_remove(
        params,
        &update.old_digest,
        &update.mid_digest,
        removals,
        &update.remove_proof,
    );
    let ins = verify_batch_insert(
        params,
        &update.mid_digest,
        &update.new_digest,
        insertions,
        &update.insert_proof,
    );
    PoeOutcome {
        valid: rm.valid && ins.valid,
        exponent_bits: rm.exponent_bits + ins.exponent_bits,
    }
}

/// Membership check against a specific prime. The element-level wrappers
/// derive the prime from the element bytes.
pub fn verify_membership_prime(
    params: &RsaParams,
    digest: &QrElement,
    prime: &BigUint,
    witness: &MembershipWitness,
) -> bool {
    witness.cofactor.pow(params, prime) == *digest
}

pub fn verify_membership(
    params: &RsaParams,
    digest: &QrElement,
    elem: &[u8],
    witness: &MembershipWitness,
) -> bool {
    verify_membership_prime(params, digest, &params.element_prime(elem), witness)
}

pub fn verify_nonmembership_prime(
    params: &RsaParams,
    digest: &QrElement,
    prime: &BigUint,
    witness: &NonMembershipWitness,
) -> bool {
    let Some(da) = digest.pow_signed(params, &witness.a) else {
        return false;
    };
    let bx = witness.b_elem.pow(params, prime);
    da.mul(params, &bx) == QrElement::generator(params)
}

pub fn verify_nonmembership(
    params: &RsaParams,
    digest: &QrElement,
    elem: &[u8],
    witness: &NonMembershipWitness,
) -> bool {
    verify_nonmembership_prime(params, digest, &params.element_prime(elem), witness)
}

#[derive(Clone, Debug)]
struct ElemEntry {
    prime: BigUint,
    count: u64,
}

/// Manager-side accumulator: tracks the multiset, maintains the digest, and
/// mints witnesses and update proofs.
#[derive(Clone, Debug)]
pub struct Accumulator {
    params: RsaParams,
    digest: QrElement,
    elems: BTreeMap<Vec<u8>, ElemEntry>,
}

/// Result of applying a parsed script operation.
#[derive(Clone, Debug)]
pub enum Applied {
    Plain { new_digest: QrElement },
    Batched { update: BatchUpdate, removal: bool },
    Swapped { update: MultiSwapUpdate },
}

impl Accumulator {
    pub fn new(params: RsaParams) -> Self {
        let digest = QrElement::generator(&params);
        Accumulator { params, digest, elems: BTreeMap::new() }
    }

    pub fn params(&self) -> &RsaParams {
        &self.params
    }

    pub fn digest(&self) -> &QrElement {
        &self.digest
    }

    pub fn count(&self, elem: &[u8]) -> u64 {
        self.elems.get(elem).map_or(0, |e| e.count)
    }

    pub fn len(&self) -> u64 {
        self.elems.values().map(|e| e.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Multiset contents as (element, count) pairs in byte order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], u64)> {
        self.elems.iter().map(|(k, v)| (k.as_slice(), v.count))
    }

    fn product_exponent(&self) -> BigUint {
        self.elems.values().fold(BigUint::one(), |acc, e| {
            acc * e.prime.pow(u32::try_from(e.count).expect("count fits u32"))
        })
    }

    /// Digest recomputed from scratch; the oracle the incremental path must
    /// always agree with.
    pub fn recompute_digest(&self) -> QrElement {
        QrElement::generator(&self.params).pow(&self.params, &self.product_exponent())
    }

    pub fn insert(&mut self, elem: &[u8]) -> QrElement {
        let prime = self
            .elems
            .get(elem)
            .map(|e| e.prime.clone())
            .unwrap_or_else(|| self.params.element_prime(elem));
        self.digest = self.digest.pow(&self.params, &prime);
        self.elems
            .entry(elem.to_vec())
            .and_modify(|e| e.count += 1)
            .or_insert(ElemEntry { prime, count: 1 });
        self.digest.clone()
    }

    pub fn remove(&mut self, elem: &[u8]) -> Result<QrElement, AccError> {
        self.take_counts(&[(elem.to_vec(), 1)])?;
        self.digest = self.recompute_digest();
        Ok(self.digest.clone())
    }

    fn take_counts(&mut self, wanted: &[(Vec<u8>, u64)]) -> Result<(), AccError> {
        for (elem, k) in wanted {
            if self.count(elem) < *k {
                return Err(AccError::NotPresent(label(elem)));
            }
        }
        for (elem, k) in wanted {
            let entry = self.elems.get_mut(elem).expect("checked above");
            entry.count -= k;
            if entry.count == 0 {
                self.elems.remove(elem);
            }
        }
        Ok(())
    }

    fn tally(batch: &[Vec<u8>]) -> Vec<(Vec<u8>, u64)> {
        let mut counts: BTreeMap<&[u8], u64> = BTreeMap::new();
        for e in batch {
            *counts.entry(e).or_insert(0) += 1;
        }
        counts.into_iter().map(|(k, v)| (k.to_vec(), v)).collect()
    }

    pub fn prove_membership(&self, elem: &[u8]) -> Result<MembershipWitness, AccError> {
        let entry = self
            .elems
            .get(elem)
            .ok_or_else(|| AccError::NotPresent(label(elem)))?;
        let cofactor_exp = &self.product_exponent() / &entry.prime;
        Ok(MembershipWitness {
            cofactor: QrElement::generator(&self.params).pow(&self.params, &cofactor_exp),
        })
    }

    pub fn prove_nonmembership(&self, elem: &[u8]) -> Result<NonMembershipWitness, AccError> {
        if self.count(elem) > 0 {
            return Err(AccError::Present(label(elem)));
        }
        let x_star = BigInt::from(self.product_exponent());
        let x_e = BigInt::from(self.params.element_prime(elem));
        let ext = x_star.extended_gcd(&x_e);
        debug_assert!(ext.gcd.is_one(), "element prime collided with the accumulated product");
        let b = ext.y;
        let b_elem = QrElement::generator(&self.params)
            .pow_signed(&self.params, &b)
            .expect("generator is a unit");
        Ok(NonMembershipWitness { a: ext.x, b_elem })
    }

    pub fn batch_insert(&mut self, batch: &[Vec<u8>]) -> BatchUpdate {
        let old = self.digest.clone();
        for elem in batch {
            self.insert(elem);
        }
        let new = self.digest.clone();
        let proof = prove_poe(&self.params, &old, &new, batch);
        BatchUpdate { old_digest: old, new_digest: new, proof }
    }

    pub fn batch_remove(&mut self, batch: &[Vec<u8>]) -> Result<BatchUpdate, AccError> {
        let old = self.digest.clone();
        self.take_counts(&Self::tally(batch))?;
        self.digest = self.recompute_digest();
        let new = self.digest.clone();
        let proof = prove_poe(&self.params, &new, &old, batch);
        Ok(BatchUpdate { old_digest: old, new_digest: new, proof })
    }

    /// Remove one batch and insert another under a single update, with one
    /// proof per direction.
    pub fn multi_swap(
        &mut self,
        removals: &[Vec<u8>],
        insertions: &[Vec<u8>],
    ) -> Result<MultiSwapUpdate, AccError> {
        let rm = self.batch_remove(removals)?;
        let ins = self.batch_insert(insertions);
        Ok(MultiSwapUpdate {
            old_digest: rm.old_digest,
            mid_digest: rm.new_digest,
            new_digest: ins.new_digest,
            remove_proof: rm.proof,
            insert_proof: ins.proof,
        })
    }

    /// Apply one parsed script operation.
    pub fn apply(&mut self, op: &AccOp) -> Result<Applied, AccError> {
        match op {
            AccOp::Insert(e) => Ok(Applied::Plain { new_digest: self.insert(e) }),
            AccOp::Remove(e) => Ok(Applied::Plain { new_digest: self.remove(e)? }),
            AccOp::BatchInsert(batch) => Ok(Applied::Batched {
                update: self.batch_insert(batch),
                removal: false,
            }),
            AccOp::BatchRemove(batch) => Ok(Applied::Batched {
                update: self.batch_remove(batch)?,
                removal: true,
            }),
            AccOp::MultiSwap { removals, insertions } => Ok(Applied::Swapped {
                update: self.multi_swap(removals, insertions)?,
            }),
        }
    }
}
