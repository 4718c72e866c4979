//! Deterministic single-purpose chain simulator.
//!
//! Each chain hosts time-locked payments for swap sessions and verifies
//! spends with an accumulator-aware rule. A spending transaction carries the
//! payer's key and pre-signature together with membership witnesses against
//! the session digests this chain has on file, plus the completed
//! signature. Verification runs six clauses in a fixed order and reports
//! the first that fails:
//!
//! 1. the signing key is in the session's key accumulator,
//! 2. the pre-signature is in the session's pre-signature accumulator,
//! 3. the pre-signature's challenge matches the session transcript
//!    recomputed from the claimed message,
//! 4. the completed signature satisfies `sG == R + T + c*pk`,
//! 5. the completed signature opens the adaptor point of its
//!    pre-signature, `(s - s')G == T`,
//! 6. a live, unexpired lock matches the payer, owner key, and message.
//!
//! Spends take effect immediately; the emitted event becomes visible to
//! observers once the height advances past it. Advancing the height also
//! refunds every active lock whose expiry has been reached, so claims are
//! valid strictly below the expiry height.

use std::collections::BTreeMap;

use crate::acc::{verify_membership, MembershipWitness, RsaParams};
use crate::group::{hash_transcript, Group, PointElement};
use crate::protocol::{AccView, ChainId, SessionId};
use crate::schnorr::{
    compute_challenge, extract_secret, verify_full, ChallengeMode, FullSignature, PartyId,
    PreSignature,
};

const TX_TAG: &str = "chain/tx/v1";
const EVENT_TAG: &str = "chain/event/v1";

/// Why a transaction was rejected; one variant per verification clause.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RejectReason {
    KeyNotAccumulated,
    PreSigNotAccumulated,
    ChallengeMismatch,
    InvalidSignature,
    AdaptorUnopened,
    LockUnavailable,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::KeyNotAccumulated => "key-not-accumulated",
            RejectReason::PreSigNotAccumulated => "presig-not-accumulated",
            RejectReason::ChallengeMismatch => "challenge-mismatch",
            RejectReason::InvalidSignature => "invalid-signature",
            RejectReason::AdaptorUnopened => "adaptor-unopened",
            RejectReason::LockUnavailable => "lock-unavailable",
        }
    }
}

impl core::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("session not registered on this chain")]
    UnknownSession,
    #[error("a lock for this payer already exists")]
    DuplicateLock,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LockState {
    Active,
    Spent,
    Refunded,
}

/// A time-locked payment commitment.
#[derive(Clone, Debug)]
pub struct LockRecord<G: Group> {
    pub session: SessionId,
    pub payer: PartyId,
    pub owner_key: G::Point,
    pub beneficiary_key: G::Point,
    pub amount: u64,
    pub expiry: u64,
    pub message: Vec<u8>,
    pub state: LockState,
}

/// A spend attempt.
#[derive(Clone, Debug)]
pub struct ChainTx<G: Group> {
    pub session: SessionId,
    pub payer: PartyId,
    pub message: Vec<u8>,
    pub signer_key: G::Point,
    pub key_witness: MembershipWitness,
    pub presig: PreSignature<G>,
    pub presig_witness: MembershipWitness,
    pub signature: FullSignature<G>,
}

impl<G: Group> ChainTx<G> {
    /// Digest of the semantic payload, used in event logs.
    pub fn digest(&self) -> [u8; 32] {
        hash_transcript(
            TX_TAG,
            &[
                &self.session.0,
                &self.payer.to_bytes(),
                &self.message,
                &self.signer_key.to_bytes(),
                &self.presig.to_bytes(),
                &self.signature.to_bytes(),
            ],
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ChainEventKind {
    LockCreated { amount: u64, expiry: u64 },
    Spent { tx_digest: [u8; 32] },
    Refunded,
}

impl ChainEventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChainEventKind::LockCreated { .. } => "lock",
            ChainEventKind::Spent { .. } => "spent",
            ChainEventKind::Refunded => "refund",
        }
    }
}

/// An accepted spend together with the height it landed at.
#[derive(Clone, Debug)]
pub struct AcceptedTx<G: Group> {
    pub height: u64,
    pub tx: ChainTx<G>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainEvent {
    pub height: u64,
    pub session: SessionId,
    pub payer: PartyId,
    pub kind: ChainEventKind,
}

impl ChainEvent {
    pub fn payload_hash(&self) -> [u8; 32] {
        let extra: Vec<u8> = match &self.kind {
            ChainEventKind::LockCreated { amount, expiry } => {
                let mut v = amount.to_be_bytes().to_vec();
                v.extend_from_slice(&expiry.to_be_bytes());
                v
            }
            ChainEventKind::Spent { tx_digest } => tx_digest.to_vec(),
            ChainEventKind::Refunded => Vec::new(),
        };
        hash_transcript(
            EVENT_TAG,
            &[
                &self.height.to_be_bytes(),
                self.kind.as_str().as_bytes(),
                &self.session.0,
                &self.payer.to_bytes(),
                &extra,
            ],
        )
    }

    /// Event log line: `<height> <kind> <payload-hash>`.
    pub fn log_line(&self) -> String {
        format!("{} {} {}", self.height, self.kind.as_str(), hex::encode(self.payload_hash()))
    }
}

/// One simulated chain.
pub struct ChainState<G: Group> {
    id: ChainId,
    height: u64,
    params: RsaParams,
    views: BTreeMap<SessionId, AccView>,
    locks: BTreeMap<(SessionId, PartyId), LockRecord<G>>,
    accepted: Vec<AcceptedTx<G>>,
    events: Vec<ChainEvent>,
}

impl<G: Group> ChainState<G> {
    pub fn new(id: ChainId, params: RsaParams) -> Self {
        ChainState {
            id,
            height: 0,
            params,
            views: BTreeMap::new(),
            locks: BTreeMap::new(),
            accepted: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn id(&self) -> ChainId {
        self.id
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    /// Install or refresh the accumulator digests for a session. The runner
    /// re-syncs this snapshot whenever the hub records new pre-signatures.
    pub fn sync_view(&mut self, session: SessionId, view: AccView) {
        self.views.insert(session, view);
    }

    pub fn view(&self, session: SessionId) -> Option<&AccView> {
        self.views.get(&session)
    }

    pub fn create_lock(
        &mut self,
        session: SessionId,
        payer: PartyId,
        owner_key: G::Point,
        beneficiary_key: G::Point,
        amount: u64,
        expiry: u64,
        message: Vec<u8>,
    ) -> Result<(), ChainError> {
        if !self.views.contains_key(&session) {
            return Err(ChainError::UnknownSession);
        }
        let id = (session, payer);
        if self.locks.contains_key(&id) {
            return Err(ChainError::DuplicateLock);
        }
        self.events.push(ChainEvent {
            height: self.height,
            session,
            payer,
            kind: ChainEventKind::LockCreated { amount, expiry },
        });
        self.locks.insert(
            id,
            LockRecord {
                session,
                payer,
                owner_key,
                beneficiary_key,
                amount,
                expiry,
                message,
                state: LockState::Active,
            },
        );
        Ok(())
    }

    pub fn lock(&self, session: SessionId, payer: PartyId) -> Option<&LockRecord<G>> {
        self.locks.get(&(session, payer))
    }

    pub fn locks_for(&self, session: SessionId) -> impl Iterator<Item = &LockRecord<G>> {
        self.locks
            .iter()
            .filter(move |((s, _), _)| *s == session)
            .map(|(_, l)| l)
    }

    /// All events ever emitted, in order.
    pub fn events(&self) -> &[ChainEvent] {
        &self.events
    }

    /// Events old enough to be visible to observers (strictly below the
    /// current height).
    pub fn confirmed_events(&self) -> impl Iterator<Item = &ChainEvent> {
        let h = self.height;
        self.events.iter().filter(move |e| e.height < h)
    }

    /// Run the six verification clauses without touching state.
    pub fn verify_tx(&self, tx: &ChainTx<G>) -> Result<(), RejectReason> {
        let view = self.views.get(&tx.session).ok_or(RejectReason::LockUnavailable)?;

        // 1. signer key accumulated
        let pk_bytes = tx.signer_key.to_bytes();
        if !verify_membership(&self.params, &view.keys, &pk_bytes, &tx.key_witness) {
            return Err(RejectReason::KeyNotAccumulated);
        }

        // 2. pre-signature accumulated
        let presig_bytes = tx.presig.to_bytes();
        if !verify_membership(&self.params, &view.presigs, &presig_bytes, &tx.presig_witness) {
            return Err(RejectReason::PreSigNotAccumulated);
        }

        // 3. challenge recomputation against the registered digests
        let keys_digest = view.keys.to_bytes(&self.params);
        let msgs_digest = view.msgs.to_bytes(&self.params);
        let mode = if view.party_count == 2 {
            ChallengeMode::Direct
        } else {
            ChallengeMode::Accumulated {
                keys_digest: &keys_digest,
                msgs_digest: &msgs_digest,
            }
        };
        let expected = compute_challenge::<G>(
            mode,
            &tx.presig.nonce_point.add(&tx.presig.adaptor_point),
            &tx.signer_key,
            &tx.message,
        );
        if tx.presig.challenge != expected {
            return Err(RejectReason::ChallengeMismatch);
        }

        // 4. completed signature equation
        if !verify_full(&tx.signature, &tx.signer_key) {
            return Err(RejectReason::InvalidSignature);
        }

        // 5. the signature must open its pre-signature's adaptor point
        if extract_secret(&tx.signature, &tx.presig).is_none() {
            return Err(RejectReason::AdaptorUnopened);
        }

        // 6. a matching live lock
        let lock = self
            .locks
            .get(&(tx.session, tx.payer))
            .ok_or(RejectReason::LockUnavailable)?;
        let usable = lock.state == LockState::Active
            && self.height < lock.expiry
            && lock.owner_key == tx.signer_key
            && lock.message == tx.message;
        if !usable {
            return Err(RejectReason::LockUnavailable);
        }
        Ok(())
    }

    /// Verify and apply a spend. The lock is consumed immediately; the
    /// event confirms at the next height.
    pub fn submit_tx(&mut self, tx: &ChainTx<G>) -> Result<(), RejectReason> {
        self.verify_tx(tx)?;
        let lock = self.locks.get_mut(&(tx.session, tx.payer)).expect("verified");
        lock.state = LockState::Spent;
        self.accepted.push(AcceptedTx { height: self.height, tx: tx.clone() });
        self.events.push(ChainEvent {
            height: self.height,
            session: tx.session,
            payer: tx.payer,
            kind: ChainEventKind::Spent { tx_digest: tx.digest() },
        });
        Ok(())
    }

    /// Accepted transactions visible to observers: landed at or after
    /// `from_height` and already below the current height.
    pub fn observe(&self, from_height: u64) -> impl Iterator<Item = &AcceptedTx<G>> {
        let h = self.height;
        self.accepted
            .iter()
            .filter(move |a| a.height >= from_height && a.height < h)
    }

    /// Number of spends this chain has accepted.
    pub fn accepted_count(&self) -> usize {
        self.accepted.len()
    }

    /// Move to the next height, refunding every active lock whose expiry
    /// has arrived.
    pub fn advance_height(&mut self) {
        self.height += 1;
        let mut refunds = Vec::new();
        for (id, lock) in self.locks.iter_mut() {
            if lock.state == LockState::Active && self.height >= lock.expiry {
                lock.state = LockState::Refunded;
                refunds.push(*id);
            }
        }
        for (session, payer) in refunds {
            self.events.push(ChainEvent {
                height: self.height,
                session,
                payer,
                kind: ChainEventKind::Refunded,
            });
        }
    }
}
