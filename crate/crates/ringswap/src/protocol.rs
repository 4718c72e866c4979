//! N-party ring swap sessions.
//!
//! Parties `0..n` stand in a ring; party `i` pays party `i+1 mod n` on chain
//! `i`. One adaptor secret `t`, held by the initiator (party 0), gates every
//! payment: the pre-signature bundle is collected around the ring, and no
//! completed signature can exist anywhere until the initiator publishes its
//! own, at which point `t` is extractable by everyone and all remaining
//! payments unlock. A session object tracks one party's view and refuses to
//! move backwards through its phases.
//!
//! Pre-signature collection is a single pass: the initiator signs first and
//! the bundle grows by one pre-signature per hop, then the completed bundle
//! is re-broadcast so every party holds all of it. (A symmetric variant in
//! which the last collector finalizes instead would work too; signing first
//! and finalizing from the same seat keeps the incentive story simplest, as
//! the one who knows `t` is also the first to commit.)
//!
//! Session-wide data lives in three accumulators managed by a hub that is
//! trusted for bookkeeping only: all public keys, all payment messages
//! (both fixed at registration), and the pre-signatures (growing as they
//! become public). Chains verify against these digests, so a party that was
//! skipped during collection, or a key swapped in after the fact, surfaces
//! as a membership failure rather than a silent fork of the terms.

use std::collections::BTreeMap;

use crate::acc::{Accumulator, MembershipWitness, QrElement, RsaParams};
use crate::ecdsa::{prove_dlog, verify_dlog, DlogProof};
use crate::group::{derive_seed, hash_transcript, Group, PointElement};
use crate::schnorr::{
    adapt, compute_challenge, extract_secret, pre_sign, pre_verify, AdaptorSecret, ChallengeMode,
    FullSignature, KeyPair, NoncePair, PartyId, PreSignature,
};

const TERMS_TAG: &str = "swap/terms/v1";
const MSG_PREFIX: &[u8; 10] = b"swapmsg/v1";

/// Chain identifier; chain `i` hosts the payment from party `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct ChainId(pub u32);

/// Identifier of one swap session, a hash of its terms.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionId(pub [u8; 32]);

impl core::fmt::Debug for SessionId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "SessionId({})", hex::encode(&self.0[..8]))
    }
}

impl core::fmt::Display for SessionId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("a session needs at least two parties")]
    EmptySession,
    #[error("terms field lengths disagree")]
    MalformedTerms,
    #[error("duplicate party key at index {0}")]
    DuplicateParty(u32),
    #[error("keypair does not match the terms entry for this party")]
    KeyMismatch,
    #[error("adaptor point announcement failed its proof of knowledge")]
    BadAdaptorProof,
    #[error("operation not valid in phase {0:?}")]
    WrongPhase(Phase),
    #[error("only the initiator may do this")]
    NotInitiator,
    #[error("signing nonce was already consumed")]
    NonceReuse,
    #[error("bundle length {got} does not match this party's turn {expected}")]
    MissingPredecessor { expected: usize, got: usize },
    #[error("pre-signature for party {0:?} failed verification")]
    BadPreSignature(PartyId),
    #[error("pre-signature challenge for party {0:?} does not match the session transcript")]
    ChallengeMismatch(PartyId),
    #[error("bundle is incomplete: {got} of {expected} pre-signatures")]
    IncompleteBundle { expected: usize, got: usize },
    #[error("published signature does not open the session adaptor point")]
    SecretMismatch,
    #[error("no pre-signature on file for party {0:?}")]
    UnknownPreSignature(PartyId),
}

/// One payment obligation, in canonical signable form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SwapMessage {
    pub label: [u8; 32],
    pub chain: ChainId,
    pub payer: PartyId,
    pub beneficiary: PartyId,
    pub amount: u64,
}

impl SwapMessage {
    pub const BYTES: usize = MSG_PREFIX.len() + 32 + 4 + 4 + 4 + 8;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::BYTES);
        out.extend_from_slice(MSG_PREFIX);
        out.extend_from_slice(&self.label);
        out.extend_from_slice(&self.chain.0.to_be_bytes());
        out.extend_from_slice(&self.payer.to_bytes());
        out.extend_from_slice(&self.beneficiary.to_bytes());
        out.extend_from_slice(&self.amount.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.len() != Self::BYTES || &bytes[..MSG_PREFIX.len()] != MSG_PREFIX {
            return None;
        }
        let mut at = MSG_PREFIX.len();
        let mut label = [0u8; 32];
        label.copy_from_slice(&bytes[at..at + 32]);
        at += 32;
        let chain = ChainId(u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()));
        at += 4;
        let payer = PartyId(u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()));
        at += 4;
        let beneficiary = PartyId(u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()));
        at += 4;
        let amount = u64::from_be_bytes(bytes[at..at + 8].try_into().unwrap());
        Some(SwapMessage { label, chain, payer, beneficiary, amount })
    }
}

/// The public terms every party must agree on before anything is signed.
#[derive(Clone, Debug)]
pub struct SwapTerms<G: Group> {
    pub label: [u8; 32],
    pub pks: Vec<G::Point>,
    pub amounts: Vec<u64>,
    pub expiries: Vec<u64>,
}

impl<G: Group> SwapTerms<G> {
    pub fn new(
        label: [u8; 32],
        pks: Vec<G::Point>,
        amounts: Vec<u64>,
        expiries: Vec<u64>,
    ) -> Result<Self, SessionError> {
        if pks.len() < 2 {
            return Err(SessionError::EmptySession);
        }
        if amounts.len() != pks.len() || expiries.len() != pks.len() {
            return Err(SessionError::MalformedTerms);
        }
        for (i, pk) in pks.iter().enumerate() {
            if pks[..i].contains(pk) {
                return Err(SessionError::DuplicateParty(i as u32));
            }
        }
        Ok(SwapTerms { label, pks, amounts, expiries })
    }

    pub fn n(&self) -> usize {
        self.pks.len()
    }

    pub fn beneficiary_of(&self, payer: PartyId) -> PartyId {
        PartyId((payer.0 + 1) % self.n() as u32)
    }

    pub fn message(&self, payer: PartyId) -> SwapMessage {
        SwapMessage {
            label: self.label,
            chain: ChainId(payer.0),
            payer,
            beneficiary: self.beneficiary_of(payer),
            amount: self.amounts[payer.0 as usize],
        }
    }

    pub fn message_bytes(&self, payer: PartyId) -> Vec<u8> {
        self.message(payer).to_bytes()
    }

    pub fn session_id(&self) -> SessionId {
        let n = (self.n() as u32).to_be_bytes();
        let mut parts: Vec<Vec<u8>> = vec![self.label.to_vec(), n.to_vec()];
        for pk in &self.pks {
            parts.push(pk.to_bytes());
        }
        for a in &self.amounts {
            parts.push(a.to_be_bytes().to_vec());
        }
        for e in &self.expiries {
            parts.push(e.to_be_bytes().to_vec());
        }
        let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
        SessionId(hash_transcript(TERMS_TAG, &refs))
    }
}

/// The initiator's public announcement of the adaptor point.
#[derive(Clone, Debug)]
pub struct AdaptorAnnouncement<G: Group> {
    pub point: G::Point,
    pub pok: DlogProof<G>,
}

/// Session life cycle, strictly forward-moving.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Phase {
    Init,
    Collecting,
    ReadyToFinalize,
    Finalized,
    Completed,
    Aborted,
}

pub type PreSigBundle<G> = Vec<PreSignature<G>>;

/// One party's view of a swap session.
pub struct SwapSession<G: Group> {
    terms: SwapTerms<G>,
    session_id: SessionId,
    me: PartyId,
    keypair: KeyPair<G>,
    nonce: Option<NoncePair<G>>,
    adaptor_point: G::Point,
    adaptor_secret: Option<AdaptorSecret<G>>,
    keys_digest: Vec<u8>,
    msgs_digest: Vec<u8>,
    phase: Phase,
    bundle: PreSigBundle<G>,
    own_presig: Option<PreSignature<G>>,
    own_signature: Option<FullSignature<G>>,
    extracted: Option<G::Scalar>,
}

impl<G: Group> SwapSession<G> {
    /// Party 0 creates the session and the adaptor secret.
    pub fn new_initiator(
        terms: SwapTerms<G>,
        keypair: KeyPair<G>,
        keys_digest: Vec<u8>,
        msgs_digest: Vec<u8>,
        adaptor_seed: &[u8],
        nonce_seed: &[u8],
    ) -> Result<(Self, AdaptorAnnouncement<G>), SessionError> {
        if keypair.public() != &terms.pks[0] {
            return Err(SessionError::KeyMismatch);
        }
        let adaptor = AdaptorSecret::<G>::generate(adaptor_seed);
        let pok = prove_dlog::<G>(adaptor.secret(), &derive_seed(adaptor_seed, "pok", 0));
        let announcement = AdaptorAnnouncement { point: adaptor.public().clone(), pok };
        let session_id = terms.session_id();
        Ok((
            SwapSession {
                adaptor_point: adaptor.public().clone(),
                adaptor_secret: Some(adaptor),
                session_id,
                me: PartyId(0),
                keypair,
                nonce: Some(NoncePair::generate(nonce_seed)),
                keys_digest,
                msgs_digest,
                phase: Phase::Init,
                bundle: Vec::new(),
                own_presig: None,
                own_signature: None,
                extracted: None,
                terms,
            },
            announcement,
        ))
    }

    /// Any other party joins after checking the adaptor announcement.
    pub fn new_participant(
        terms: SwapTerms<G>,
        me: PartyId,
        keypair: KeyPair<G>,
        announcement: &AdaptorAnnouncement<G>,
        keys_digest: Vec<u8>,
        msgs_digest: Vec<u8>,
        nonce_seed: &[u8],
    ) -> Result<Self, SessionError> {
        let idx = me.0 as usize;
        if idx == 0 || idx >= terms.n() {
            return Err(SessionError::KeyMismatch);
        }
        if keypair.public() != &terms.pks[idx] {
            return Err(SessionError::KeyMismatch);
        }
        if !verify_dlog::<G>(&announcement.point, &announcement.pok) {
            return Err(SessionError::BadAdaptorProof);
        }
        let session_id = terms.session_id();
        Ok(SwapSession {
            session_id,
            me,
            keypair,
            nonce: Some(NoncePair::generate(nonce_seed)),
            adaptor_point: announcement.point.clone(),
            adaptor_secret: None,
            keys_digest,
            msgs_digest,
            phase: Phase::Init,
            bundle: Vec::new(),
            own_presig: None,
            own_signature: None,
            extracted: None,
            terms,
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn session_id(&self) -> SessionId {
        self.session_id
    }

    pub fn party(&self) -> PartyId {
        self.me
    }

    pub fn adaptor_point(&self) -> &G::Point {
        &self.adaptor_point
    }

    pub fn bundle(&self) -> &[PreSignature<G>] {
        &self.bundle
    }

    pub fn my_message(&self) -> SwapMessage {
        self.terms.message(self.me)
    }

    pub fn own_signature(&self) -> Option<&FullSignature<G>> {
        self.own_signature.as_ref()
    }

    /// The adaptor secret, once known (initiators always, others after
    /// extraction).
    pub fn secret(&self) -> Option<&G::Scalar> {
        self.extracted
            .as_ref()
            .or_else(|| self.adaptor_secret.as_ref().map(|a| a.secret()))
    }

    /// Challenge transcript shape for this session: two parties sign the
    /// plain form, larger rings bind the accumulator digests.
    fn mode(&self) -> ChallengeMode<'_> {
        if self.terms.n() == 2 {
            ChallengeMode::Direct
        } else {
            ChallengeMode::Accumulated {
                keys_digest: &self.keys_digest,
                msgs_digest: &self.msgs_digest,
            }
        }
    }

    /// Expected challenge for party `who`, given its nonce point.
    pub fn expected_challenge(&self, who: PartyId, nonce_point: &G::Point) -> G::Scalar {
        compute_challenge::<G>(
            self.mode(),
            &nonce_point.add(&self.adaptor_point),
            &self.terms.pks[who.0 as usize],
            &self.terms.message_bytes(who),
        )
    }

    fn check_slot(&self, idx: usize, presig: &PreSignature<G>) -> Result<(), SessionError> {
        let who = PartyId(idx as u32);
        if presig.party != who || presig.adaptor_point != self.adaptor_point {
            return Err(SessionError::BadPreSignature(who));
        }
        let expect = self.expected_challenge(who, &presig.nonce_point);
        if presig.challenge != expect {
            return Err(SessionError::ChallengeMismatch(who));
        }
        if !pre_verify(presig, &self.terms.pks[idx]) {
            return Err(SessionError::BadPreSignature(who));
        }
        Ok(())
    }

    fn sign_own(&mut self) -> Result<PreSignature<G>, SessionError> {
        let nonce = self.nonce.take().ok_or(SessionError::NonceReuse)?;
        let challenge = self.expected_challenge(self.me, nonce.public());
        let presig = pre_sign(self.me, &self.keypair, nonce, &self.adaptor_point, &challenge);
        self.own_presig = Some(presig.clone());
        Ok(presig)
    }

    /// Initiator opens the collection pass with its own pre-signature.
    pub fn start(&mut self) -> Result<PreSigBundle<G>, SessionError> {
        if self.me != PartyId(0) {
            return Err(SessionError::NotInitiator);
        }
        if self.phase != Phase::Init {
            return Err(SessionError::WrongPhase(self.phase));
        }
        let presig = self.sign_own()?;
        self.bundle = vec![presig];
        self.phase = Phase::Collecting;
        Ok(self.bundle.clone())
    }

    /// A participant takes the bundle on its turn: verify everything so
    /// far, append its own pre-signature, pass it on.
    pub fn step(&mut self, bundle: PreSigBundle<G>) -> Result<PreSigBundle<G>, SessionError> {
        if self.phase > Phase::Collecting {
            return Err(SessionError::WrongPhase(self.phase));
        }
        let idx = self.me.0 as usize;
        if bundle.len() != idx {
            return Err(SessionError::MissingPredecessor { expected: idx, got: bundle.len() });
        }
        for (j, presig) in bundle.iter().enumerate() {
            self.check_slot(j, presig)?;
        }
        let own = self.sign_own()?;
        self.bundle = bundle;
        self.bundle.push(own);
        self.phase = if self.bundle.len() == self.terms.n() {
            Phase::ReadyToFinalize
        } else {
            Phase::Collecting
        };
        Ok(self.bundle.clone())
    }

    /// Take in the completed, re-broadcast bundle. Own slot must hold
    /// exactly the pre-signature this party produced.
    pub fn accept_bundle(&mut self, bundle: PreSigBundle<G>) -> Result<(), SessionError> {
        if self.phase > Phase::Collecting {
            return Err(SessionError::WrongPhase(self.phase));
        }
        let n = self.terms.n();
        if bundle.len() != n {
            return Err(SessionError::IncompleteBundle { expected: n, got: bundle.len() });
        }
        for (j, presig) in bundle.iter().enumerate() {
            self.check_slot(j, presig)?;
        }
        match &self.own_presig {
            Some(own) if *own == bundle[self.me.0 as usize] => {}
            _ => return Err(SessionError::BadPreSignature(self.me)),
        }
        self.bundle = bundle;
        self.phase = Phase::ReadyToFinalize;
        Ok(())
    }

    /// Initiator completes its own signature, publishing the secret.
    pub fn finalize(&mut self) -> Result<FullSignature<G>, SessionError> {
        if self.me != PartyId(0) {
            return Err(SessionError::NotInitiator);
        }
        if self.phase != Phase::ReadyToFinalize {
            return Err(SessionError::WrongPhase(self.phase));
        }
        let secret = self.adaptor_secret.as_ref().expect("initiator holds the secret");
        let sig = adapt(&self.bundle[0], secret.secret());
        self.own_signature = Some(sig.clone());
        self.phase = Phase::Finalized;
        Ok(sig)
    }

    /// Extract the secret from any published completed signature of this
    /// session and complete this party's own signature with it.
    pub fn observe_and_complete(
        &mut self,
        sig: &FullSignature<G>,
    ) -> Result<FullSignature<G>, SessionError> {
        if self.phase != Phase::ReadyToFinalize {
            return Err(SessionError::WrongPhase(self.phase));
        }
        let idx = sig.party.0 as usize;
        if idx >= self.bundle.len() {
            return Err(SessionError::UnknownPreSignature(sig.party));
        }
        let secret =
            extract_secret(sig, &self.bundle[idx]).ok_or(SessionError::SecretMismatch)?;
        let own = self.own_presig.as_ref().expect("bundle accepted implies own pre-signature");
        let own_sig = adapt(own, &secret);
        self.extracted = Some(secret);
        self.own_signature = Some(own_sig.clone());
        self.phase = Phase::Finalized;
        Ok(own_sig)
    }

    /// Runner bookkeeping: the party's incoming payment settled.
    pub fn mark_completed(&mut self) -> Result<(), SessionError> {
        if self.phase != Phase::Finalized {
            return Err(SessionError::WrongPhase(self.phase));
        }
        self.phase = Phase::Completed;
        Ok(())
    }

    /// Runner bookkeeping: the session is dead (timeout or detected abuse).
    pub fn mark_aborted(&mut self) {
        if self.phase != Phase::Completed {
            self.phase = Phase::Aborted;
        }
    }
}

/// Digest snapshot of one session's accumulators, as consumed by chains.
#[derive(Clone, Debug)]
pub struct AccView {
    pub keys: QrElement,
    pub msgs: QrElement,
    pub presigs: QrElement,
    pub party_count: u32,
}

struct SessionAccs {
    keys: Accumulator,
    msgs: Accumulator,
    presigs: Accumulator,
    party_count: u32,
}

/// Bookkeeping service that maintains the session accumulators and hands
/// out membership witnesses. It is trusted for liveness only; every digest
/// and witness it produces is independently checkable.
pub struct AccumulatorHub {
    params: RsaParams,
    sessions: BTreeMap<SessionId, SessionAccs>,
}

impl AccumulatorHub {
    pub fn new(params: RsaParams) -> Self {
        AccumulatorHub { params, sessions: BTreeMap::new() }
    }

    pub fn params(&self) -> &RsaParams {
        &self.params
    }

    /// Fix the key and message sets for a session.
    pub fn register_session(
        &mut self,
        sid: SessionId,
        keys: impl IntoIterator<Item = Vec<u8>>,
        msgs: impl IntoIterator<Item = Vec<u8>>,
    ) {
        let mut acc_keys = Accumulator::new(self.params.clone());
        let mut count = 0u32;
        for k in keys {
            acc_keys.insert(&k);
            count += 1;
        }
        let mut acc_msgs = Accumulator::new(self.params.clone());
        for m in msgs {
            acc_msgs.insert(&m);
        }
        self.sessions.insert(
            sid,
            SessionAccs {
                keys: acc_keys,
                msgs: acc_msgs,
                presigs: Accumulator::new(self.params.clone()),
                party_count: count,
            },
        );
    }

    /// Record a pre-signature that has become public.
    pub fn record_presig(&mut self, sid: SessionId, presig_bytes: &[u8]) {
        let accs = self.sessions.get_mut(&sid).expect("session registered");
        accs.presigs.insert(presig_bytes);
    }

    pub fn view(&self, sid: SessionId) -> Option<AccView> {
        self.sessions.get(&sid).map(|a| AccView {
            keys: a.keys.digest().clone(),
            msgs: a.msgs.digest().clone(),
            presigs: a.presigs.digest().clone(),
            party_count: a.party_count,
        })
    }

    pub fn keys_digest_bytes(&self, sid: SessionId) -> Option<Vec<u8>> {
        self.sessions.get(&sid).map(|a| a.keys.digest().to_bytes(&self.params))
    }

    pub fn msgs_digest_bytes(&self, sid: SessionId) -> Option<Vec<u8>> {
        self.sessions.get(&sid).map(|a| a.msgs.digest().to_bytes(&self.params))
    }

    pub fn witness_key(&self, sid: SessionId, pk_bytes: &[u8]) -> Option<MembershipWitness> {
        self.sessions.get(&sid)?.keys.prove_membership(pk_bytes).ok()
    }

    pub fn witness_msg(&self, sid: SessionId, msg_bytes: &[u8]) -> Option<MembershipWitness> {
        self.sessions.get(&sid)?.msgs.prove_membership(msg_bytes).ok()
    }

    pub fn witness_presig(
        &self,
        sid: SessionId,
        presig_bytes: &[u8],
    ) -> Option<MembershipWitness> {
        self.sessions.get(&sid)?.presigs.prove_membership(presig_bytes).ok()
    }
}
