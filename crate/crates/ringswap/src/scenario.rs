//! Scripted swap runs over the chain simulator.
//!
//! A scenario assigns one [`Behavior`] per party, executes the whole swap
//! under a deterministic round schedule, and reduces the final chain state
//! to a [`Verdict`]: either everyone got paid, or everyone got refunded.
//! Anything in between is a `Violation`, which a healthy protocol never
//! produces.
//!
//! The schedule is fixed: locks are funded at height 0, the pre-signature
//! ring runs off-chain, adversarial probes fire before finalization, the
//! initiator finalizes and claims, everyone else observes and claims,
//! still-open locks are rescued by any party that learned the secret, and
//! finally the clock runs past expiry so abandoned locks refund. Identical
//! seeds and behaviors give byte-identical transcripts.

use std::collections::BTreeMap;

use crate::acc::RsaParams;
use crate::chain::{ChainState, ChainTx};
use crate::group::{derive_seed, hash_transcript, Group, PointElement, ScalarElement};
use crate::protocol::{
    AccumulatorHub, AdaptorAnnouncement, ChainId, Phase, SessionError, SessionId, SwapSession,
    SwapTerms,
};
use crate::schnorr::{adapt, compute_challenge, ChallengeMode, FullSignature, KeyPair, PartyId, PreSignature};
use crate::transcript::{hex_of, Record, TRANSCRIPT_VERSION};

/// What a party does during a run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Behavior {
    Honest,
    /// Provides its pre-signature, then goes silent: never observes, never
    /// claims. Its outgoing payment is rescued by whoever knows the secret.
    DropoutAfterFinalize,
    /// Vanishes before contributing its pre-signature; the ring stalls and
    /// every lock refunds.
    DropoutBeforeFinalize,
    /// After signing, forwards the bundle past `target` to `target + 1`.
    Skipper { target: PartyId },
    /// Participates honestly but also fires forged spends of the victim's
    /// lock under its own key.
    Impersonator { victim: PartyId },
    /// Publishes the full pre-signature bundle and the adaptor point to an
    /// outside adversary before finalization.
    Leaker,
}

impl Behavior {
    /// Whether the party contributes its pre-signature.
    fn signs(&self) -> bool {
        !matches!(self, Behavior::DropoutBeforeFinalize)
    }

    /// Whether the party watches the chains and claims its own payment.
    fn observes(&self) -> bool {
        !matches!(self, Behavior::DropoutBeforeFinalize | Behavior::DropoutAfterFinalize)
    }
}

impl core::fmt::Display for Behavior {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Behavior::Honest => write!(f, "honest"),
            Behavior::DropoutAfterFinalize => write!(f, "dropout-after-finalize"),
            Behavior::DropoutBeforeFinalize => write!(f, "dropout-before-finalize"),
            Behavior::Skipper { target } => write!(f, "skipper:{}", target.0),
            Behavior::Impersonator { victim } => write!(f, "impersonator:{}", victim.0),
            Behavior::Leaker => write!(f, "leaker"),
        }
    }
}

impl core::str::FromStr for Behavior {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<PartyId, String> {
            let a = a.ok_or_else(|| format!("behavior {head} needs a party argument"))?;
            a.parse::<u32>().map(PartyId).map_err(|_| format!("bad party index {a}"))
        };
        match head {
            "honest" => Ok(Behavior::Honest),
            "dropout-after-finalize" => Ok(Behavior::DropoutAfterFinalize),
            "dropout-before-finalize" => Ok(Behavior::DropoutBeforeFinalize),
            "skipper" => Ok(Behavior::Skipper { target: num(arg)? }),
            "impersonator" => Ok(Behavior::Impersonator { victim: num(arg)? }),
            "leaker" => Ok(Behavior::Leaker),
            other => Err(format!("unknown behavior {other}")),
        }
    }
}

/// Atomicity verdict of a finished run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    AllCompleted,
    NoneCompleted,
    Violation,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::AllCompleted => "all-completed",
            Verdict::NoneCompleted => "none-completed",
            Verdict::Violation => "violation",
        }
    }
}

impl core::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-completed" => Ok(Verdict::AllCompleted),
            "none-completed" => Ok(Verdict::NoneCompleted),
            "violation" => Ok(Verdict::Violation),
            other => Err(format!("unknown verdict {other}")),
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inputs of one scenario run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScenarioSpec {
    pub seed: Vec<u8>,
    pub behaviors: Vec<Behavior>,
    pub amounts: Vec<u64>,
    pub expiry: u64,
    /// Trials per adversarial probe (impersonation / leak behaviors).
    pub probe_trials: u32,
}

impl ScenarioSpec {
    pub fn honest(n: u32, seed: &[u8]) -> Self {
        ScenarioSpec {
            seed: seed.to_vec(),
            behaviors: vec![Behavior::Honest; n as usize],
            amounts: (0..n as u64).map(|i| 100 + i).collect(),
            expiry: 10,
            probe_trials: 16,
        }
    }

    pub fn n(&self) -> u32 {
        self.behaviors.len() as u32
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = self.behaviors.len();
        if n < 2 {
            return Err("a swap needs at least two parties".into());
        }
        if self.amounts.len() != n {
            return Err("amounts must list one value per party".into());
        }
        if self.seed.is_empty() {
            return Err("seed must be non-empty".into());
        }
        if self.expiry < 5 {
            return Err("expiry must be at least 5 so claims fit before refunds".into());
        }
        for (i, b) in self.behaviors.iter().enumerate() {
            match b {
                Behavior::Skipper { target } => {
                    if (target.0 as usize) <= i || (target.0 as usize) >= n {
                        return Err(format!(
                            "party {i} cannot skip party {}: target must lie ahead in the ring",
                            target.0
                        ));
                    }
                }
                Behavior::Impersonator { victim } => {
                    if (victim.0 as usize) >= n || victim.0 as usize == i {
                        return Err(format!("party {i} cannot impersonate party {}", victim.0));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Hash over all inputs, embedded in transcript headers.
    pub fn config_hash(&self) -> [u8; 32] {
        let behaviors = self
            .behaviors
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let amounts: Vec<u8> =
            self.amounts.iter().flat_map(|a| a.to_be_bytes()).collect();
        hash_transcript(
            "scenario/config/v1",
            &[
                &self.seed,
                behaviors.as_bytes(),
                &amounts,
                &self.expiry.to_be_bytes(),
                &self.probe_trials.to_be_bytes(),
            ],
        )
    }
}

/// Tally of one adversarial probe.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ProbeStats {
    pub attempts: u64,
    pub accepted: u64,
    pub rejections: BTreeMap<String, u64>,
}

impl ProbeStats {
    fn rejected(&mut self, reason: impl Into<String>) {
        self.attempts += 1;
        *self.rejections.entry(reason.into()).or_insert(0) += 1;
    }

    fn accepted(&mut self) {
        self.attempts += 1;
        self.accepted += 1;
    }

    fn to_record(&self, name: &str) -> Record {
        Record::Probe {
            name: name.to_string(),
            attempts: self.attempts,
            accepted: self.accepted,
            rejections: self.rejections.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }
}

/// Result of a finished scenario.
#[derive(Clone, PartialEq, Debug)]
pub struct ScenarioOutcome {
    pub verdict: Verdict,
    /// Net asset movement per party: incoming amount minus outgoing amount,
    /// zero for refunded legs.
    pub deltas: Vec<i64>,
    /// Accepted spend count per chain.
    pub accepted: Vec<u64>,
    /// Rejected submissions across the run (probes included), keyed by
    /// rejection reason.
    pub rejections: BTreeMap<String, u64>,
    /// Protocol-level rejections: which party refused which delivery.
    pub session_errors: Vec<(PartyId, String)>,
    /// Transcript records of the whole run (without the closing record).
    pub records: Vec<Record>,
}

fn session_error_code(e: &SessionError) -> &'static str {
    match e {
        SessionError::EmptySession => "empty-session",
        SessionError::MalformedTerms => "malformed-terms",
        SessionError::DuplicateParty(_) => "duplicate-party",
        SessionError::KeyMismatch => "key-mismatch",
        SessionError::BadAdaptorProof => "bad-adaptor-proof",
        SessionError::WrongPhase(_) => "wrong-phase",
        SessionError::NotInitiator => "not-initiator",
        SessionError::NonceReuse => "nonce-reuse",
        SessionError::MissingPredecessor { .. } => "missing-predecessor",
        SessionError::BadPreSignature(_) => "bad-pre-signature",
        SessionError::ChallengeMismatch(_) => "challenge-mismatch",
        SessionError::IncompleteBundle { .. } => "incomplete-bundle",
        SessionError::SecretMismatch => "secret-mismatch",
        SessionError::UnknownPreSignature(_) => "unknown-pre-signature",
    }
}

struct Runner<G: Group> {
    spec: ScenarioSpec,
    terms: SwapTerms<G>,
    sid: SessionId,
    sessions: Vec<SwapSession<G>>,
    hub: AccumulatorHub,
    chains: Vec<ChainState<G>>,
    records: Vec<Record>,
    rejections: BTreeMap<String, u64>,
    session_errors: Vec<(PartyId, String)>,
}

/// Execute a scenario. `params` is the accumulator profile; pass the same
/// params to reproduce a run bit for bit.
pub fn run_scenario<G: Group>(spec: &ScenarioSpec, params: &RsaParams) -> ScenarioOutcome {
    spec.validate().expect("scenario spec must be validated by the caller");
    let mut r = Runner::<G>::setup(spec.clone(), params);
    let complete = r.collection_ring();
    r.probes(&complete);
    let finalized = r.finalize_and_claim(complete);
    if finalized {
        r.observe_round();
        r.rescue_round();
    }
    r.close_out()
}

impl<G: Group> Runner<G> {
    fn setup(spec: ScenarioSpec, params: &RsaParams) -> Self {
        let n = spec.n();
        let keypairs: Vec<KeyPair<G>> = (0..n as u64)
            .map(|i| KeyPair::generate(&derive_seed(&spec.seed, "key", i)))
            .collect();
        let label = hash_transcript("scenario/label/v1", &[&spec.seed]);
        let terms = SwapTerms::<G>::new(
            label,
            keypairs.iter().map(|k| k.public().clone()).collect(),
            spec.amounts.clone(),
            vec![spec.expiry; n as usize],
        )
        .expect("validated spec builds valid terms");
        let sid = terms.session_id();

        let mut records = vec![
            Record::Header {
                version: TRANSCRIPT_VERSION,
                group: G::ID.to_string(),
                parties: n,
                seed: hex_of(&spec.seed),
                config_hash: hex_of(&spec.config_hash()),
            },
            Record::AccParams {
                modulus: hex_of(&params.modulus().to_bytes_be()),
                generator: hex_of(&crate::acc::QrElement::generator(params).to_bytes(params)),
                prime_bits: params.prime_bits,
                mr_rounds: params.mr_rounds,
            },
            Record::Terms {
                label: hex_of(&label),
                session: hex_of(&sid.0),
                pks: terms.pks.iter().map(|p| hex_of(&p.to_bytes())).collect(),
                amounts: terms.amounts.clone(),
                expiries: terms.expiries.clone(),
            },
        ];

        let mut hub = AccumulatorHub::new(params.clone());
        hub.register_session(
            sid,
            terms.pks.iter().map(|p| p.to_bytes()),
            (0..n).map(|i| terms.message_bytes(PartyId(i))),
        );
        let kd = hub.keys_digest_bytes(sid).expect("registered");
        let md = hub.msgs_digest_bytes(sid).expect("registered");

        let (initiator, ann) = SwapSession::new_initiator(
            terms.clone(),
            keypairs[0].clone(),
            kd.clone(),
            md.clone(),
            &derive_seed(&spec.seed, "adaptor", 0),
            &derive_seed(&spec.seed, "nonce", 0),
        )
        .expect("initiator setup");
        records.push(Record::Adaptor {
            point: hex_of(&ann.point.to_bytes()),
            pok_a: hex_of(&ann.pok.a.to_bytes()),
            pok_z: hex_of(&ann.pok.z.to_bytes()),
        });
        records.push(Record::Digests { keys: hex_of(&kd), msgs: hex_of(&md) });

        let mut sessions = vec![initiator];
        for i in 1..n {
            sessions.push(
                SwapSession::new_participant(
                    terms.clone(),
                    PartyId(i),
                    keypairs[i as usize].clone(),
                    &ann,
                    kd.clone(),
                    md.clone(),
                    &derive_seed(&spec.seed, "nonce", i as u64),
                )
                .expect("participant setup"),
            );
        }

        let mut chains = Vec::new();
        for i in 0..n {
            let mut chain = ChainState::<G>::new(ChainId(i), params.clone());
            chain.sync_view(sid, hub.view(sid).expect("registered"));
            let payer = PartyId(i);
            let beneficiary = terms.beneficiary_of(payer);
            chain
                .create_lock(
                    sid,
                    payer,
                    terms.pks[i as usize].clone(),
                    terms.pks[beneficiary.0 as usize].clone(),
                    terms.amounts[i as usize],
                    spec.expiry,
                    terms.message_bytes(payer),
                )
                .expect("fresh chain accepts the lock");
            chain.advance_height();
            chains.push(chain);
        }

        Runner {
            spec,
            terms,
            sid,
            sessions,
            hub,
            chains,
            records,
            rejections: BTreeMap::new(),
            session_errors: Vec::new(),
        }
    }

    fn reject_protocol(&mut self, party: PartyId, e: &SessionError) {
        self.session_errors.push((party, e.to_string()));
        *self.rejections.entry(session_error_code(e).to_string()).or_insert(0) += 1;
        self.records.push(Record::ProtocolReject { party: party.0, error: e.to_string() });
    }

    /// Run the pre-signature ring. Returns true when the bundle completed.
    fn collection_ring(&mut self) -> bool {
        let n = self.spec.n() as usize;
        let behaviors = self.spec.behaviors.clone();

        if !behaviors[0].signs() {
            let e = SessionError::WrongPhase(Phase::Init);
            self.session_errors.push((PartyId(0), "initiator dropped before starting".into()));
            let _ = e;
            self.records.push(Record::ProtocolReject {
                party: 0,
                error: "initiator dropped before starting".into(),
            });
            return false;
        }

        let mut bundle = self.sessions[0].start().expect("initiator starts once");
        self.note_presig(&bundle[0]);
        let mut cursor = self.delivery_target(0, 1);

        let mut complete = bundle.len() == n;
        while cursor < n {
            let party = PartyId(cursor as u32);
            if !behaviors[cursor].signs() {
                self.session_errors.push((party, "dropped before signing".into()));
                self.records.push(Record::ProtocolReject {
                    party: party.0,
                    error: "dropped before signing".into(),
                });
                break;
            }
            match self.sessions[cursor].step(bundle.clone()) {
                Ok(next) => {
                    bundle = next;
                    self.note_presig(bundle.last().expect("step appends"));
                    if bundle.len() == n {
                        complete = true;
                        break;
                    }
                    cursor = self.delivery_target(cursor, cursor + 1);
                }
                Err(e) => {
                    self.reject_protocol(party, &e);
                    break;
                }
            }
        }

        if complete {
            for s in self.sessions.iter_mut() {
                if s.phase() < Phase::ReadyToFinalize {
                    s.accept_bundle(bundle.clone()).expect("honestly built bundle");
                }
            }
        }
        let digest = self
            .hub
            .view(self.sid)
            .expect("registered")
            .presigs
            .to_bytes(self.hub.params());
        self.records.push(Record::PresigAcc { digest: hex_of(&digest) });
        self.sync_views();
        complete
    }

    /// Where party `from` sends the bundle next; skippers jump the ring.
    fn delivery_target(&self, from: usize, natural: usize) -> usize {
        match self.spec.behaviors[from] {
            Behavior::Skipper { target } => target.0 as usize + 1,
            _ => natural,
        }
    }

    fn note_presig(&mut self, presig: &PreSignature<G>) {
        self.hub.record_presig(self.sid, &presig.to_bytes());
        self.records.push(Record::PreSig {
            party: presig.party.0,
            bytes: hex_of(&presig.to_bytes()),
        });
    }

    fn sync_views(&mut self) {
        let view = self.hub.view(self.sid).expect("registered");
        for chain in self.chains.iter_mut() {
            chain.sync_view(self.sid, view.clone());
        }
    }

    /// Pre-finalization adversarial probes driven by behaviors.
    fn probes(&mut self, complete: &bool) {
        let behaviors = self.spec.behaviors.clone();
        let trials = self.spec.probe_trials;
        for (i, b) in behaviors.iter().enumerate() {
            match b {
                Behavior::Impersonator { victim } => {
                    let seed = derive_seed(&self.spec.seed, "impersonate", i as u64);
                    let stats = forge_impersonation_txs(
                        &mut self.chains,
                        &self.hub,
                        &self.terms,
                        self.sid,
                        *victim,
                        trials,
                        &seed,
                    );
                    self.absorb_probe("impersonation", &stats);
                }
                Behavior::Leaker if *complete => {
                    let bundle = self.sessions[0].bundle().to_vec();
                    let adaptor = self.sessions[0].adaptor_point().clone();
                    let seed = derive_seed(&self.spec.seed, "leak", i as u64);
                    let stats = forge_completion_txs(
                        &mut self.chains,
                        &self.hub,
                        &self.terms,
                        self.sid,
                        &bundle,
                        &adaptor,
                        trials,
                        &seed,
                    );
                    self.absorb_probe("leak", &stats);
                }
                _ => {}
            }
        }
    }

    fn absorb_probe(&mut self, name: &str, stats: &ProbeStats) {
        assert_eq!(stats.accepted, 0, "adversarial probe must never land a spend");
        for (k, v) in &stats.rejections {
            *self.rejections.entry(k.clone()).or_insert(0) += v;
        }
        self.records.push(stats.to_record(name));
    }

    fn claim(&mut self, payer: PartyId, sig: FullSignature<G>) {
        let chain = payer.0 as usize;
        let presig = self.sessions[0].bundle()[chain].clone();
        let tx = build_claim_tx(&self.hub, &self.terms, self.sid, payer, &presig, sig);
        match self.chains[chain].submit_tx(&tx) {
            Ok(()) => {
                self.records.push(Record::TxAccepted {
                    chain: chain as u32,
                    height: self.chains[chain].height(),
                    payer: payer.0,
                    key_witness: hex_of(&tx.key_witness.cofactor.to_bytes(self.hub.params())),
                    presig_witness: hex_of(
                        &tx.presig_witness.cofactor.to_bytes(self.hub.params()),
                    ),
                    sig: hex_of(&tx.signature.to_bytes()),
                });
            }
            Err(reason) => {
                *self.rejections.entry(reason.as_str().to_string()).or_insert(0) += 1;
                self.records.push(Record::TxRejected {
                    chain: chain as u32,
                    payer: payer.0,
                    reason: reason.as_str().to_string(),
                });
            }
        }
    }

    /// Initiator finalizes and submits its own claim. Returns true when a
    /// full signature reached a chain.
    fn finalize_and_claim(&mut self, complete: bool) -> bool {
        if !complete {
            return false;
        }
        let sig = self.sessions[0].finalize().expect("complete bundle finalizes");
        self.records.push(Record::Finalize { sig: hex_of(&sig.to_bytes()) });
        if !self.spec.behaviors[0].observes() {
            // Finalized but withheld: nothing reaches any chain.
            return false;
        }
        self.claim(PartyId(0), sig);
        self.step_chains();
        true
    }

    fn step_chains(&mut self) {
        for chain in self.chains.iter_mut() {
            chain.advance_height();
        }
    }

    /// Every observing party pulls the initiator's accepted spend,
    /// extracts the secret, and claims its own payment.
    fn observe_round(&mut self) {
        let n = self.spec.n() as usize;
        for i in 1..n {
            if !self.spec.behaviors[i].observes() {
                continue;
            }
            if self.sessions[i].phase() != Phase::ReadyToFinalize {
                continue;
            }
            let observed = match self.chains[0].observe(0).next() {
                Some(a) => a.tx.signature.clone(),
                None => continue,
            };
            match self.sessions[i].observe_and_complete(&observed) {
                Ok(own) => {
                    self.records.push(Record::Complete {
                        party: i as u32,
                        sig: hex_of(&own.to_bytes()),
                    });
                    self.claim(PartyId(i as u32), own);
                }
                Err(e) => self.reject_protocol(PartyId(i as u32), &e),
            }
        }
        self.step_chains();
    }

    /// Any party that knows the secret completes abandoned legs: adapting a
    /// public pre-signature needs nothing but the bundle and `t`.
    fn rescue_round(&mut self) {
        let n = self.spec.n() as usize;
        let rescuer = (0..n).find(|i| {
            self.spec.behaviors[*i].observes() && self.sessions[*i].secret().is_some()
        });
        let Some(rescuer) = rescuer else {
            return;
        };
        let t = self.sessions[rescuer].secret().expect("just checked").clone();
        let bundle = self.sessions[0].bundle().to_vec();
        for c in 0..n {
            let payer = PartyId(c as u32);
            let open = self.chains[c]
                .lock(self.sid, payer)
                .map(|l| l.state == crate::chain::LockState::Active)
                .unwrap_or(false);
            if !open {
                continue;
            }
            let sig = adapt(&bundle[c], &t);
            self.claim(payer, sig);
        }
        self.step_chains();
    }

    /// Run the clock past expiry, settle refunds, and compute the verdict.
    fn close_out(mut self) -> ScenarioOutcome {
        let n = self.spec.n() as usize;
        while self.chains[0].height() <= self.spec.expiry {
            self.step_chains();
        }

        let mut deltas = vec![0i64; n];
        let mut spent = 0usize;
        let mut refunded = 0usize;
        let mut accepted = Vec::new();
        for c in 0..n {
            let payer = PartyId(c as u32);
            let lock = self.chains[c].lock(self.sid, payer).expect("lock exists");
            match lock.state {
                crate::chain::LockState::Spent => {
                    spent += 1;
                    let beneficiary = self.terms.beneficiary_of(payer);
                    deltas[c] -= lock.amount as i64;
                    deltas[beneficiary.0 as usize] += lock.amount as i64;
                }
                crate::chain::LockState::Refunded => refunded += 1,
                crate::chain::LockState::Active => {}
            }
            accepted.push(self.chains[c].accepted_count() as u64);
        }
        let verdict = if spent == n {
            Verdict::AllCompleted
        } else if refunded == n {
            Verdict::NoneCompleted
        } else {
            Verdict::Violation
        };

        for c in 0..n {
            self.records.push(Record::ChainLog {
                chain: c as u32,
                lines: self.chains[c].events().iter().map(|e| e.log_line()).collect(),
            });
        }
        self.records.push(Record::Verdict {
            verdict: verdict.as_str().to_string(),
            deltas: deltas.clone(),
            accepted: accepted.clone(),
        });

        ScenarioOutcome {
            verdict,
            deltas,
            accepted,
            rejections: self.rejections,
            session_errors: self.session_errors,
            records: self.records,
        }
    }
}

fn build_claim_tx<G: Group>(
    hub: &AccumulatorHub,
    terms: &SwapTerms<G>,
    sid: SessionId,
    payer: PartyId,
    presig: &PreSignature<G>,
    signature: FullSignature<G>,
) -> ChainTx<G> {
    let pk = terms.pks[payer.0 as usize].clone();
    ChainTx {
        session: sid,
        payer,
        message: terms.message_bytes(payer),
        signer_key: pk.clone(),
        key_witness: hub.witness_key(sid, &pk.to_bytes()).expect("key registered"),
        presig: presig.clone(),
        presig_witness: hub
            .witness_presig(sid, &presig.to_bytes())
            .expect("pre-signature recorded"),
        signature,
    }
}

/// Forged completion attempts by an adversary holding the full bundle and
/// the adaptor point but not the secret. All witnesses are honest (the
/// accumulator is public infrastructure); only the secret is missing.
#[allow(clippy::too_many_arguments)]
pub fn forge_completion_txs<G: Group>(
    chains: &mut [ChainState<G>],
    hub: &AccumulatorHub,
    terms: &SwapTerms<G>,
    sid: SessionId,
    bundle: &[PreSignature<G>],
    adaptor_point: &G::Point,
    trials: u32,
    seed: &[u8],
) -> ProbeStats {
    let mut stats = ProbeStats::default();
    for j in 0..trials {
        let target = (j as usize) % bundle.len();
        let presig = &bundle[target];
        let guess = G::scalar_from_seed(&derive_seed(seed, "guess", j as u64));
        let s = match j % 4 {
            // wild guess of the completed scalar
            0 => guess,
            // random offset from the pre-signature scalar
            1 => presig.s.add(&guess),
            // a "clever" guess folding in the leaked adaptor point
            2 => presig.s.add(&G::coord_scalar(adaptor_point)),
            // replaying the unadapted pre-signature scalar as-is
            _ => presig.s.clone(),
        };
        let sig = FullSignature {
            party: presig.party,
            challenge: presig.challenge.clone(),
            s,
            nonce_point: presig.nonce_point.clone(),
            adaptor_point: presig.adaptor_point.clone(),
        };
        let tx = build_claim_tx(hub, terms, sid, presig.party, presig, sig);
        match chains[target].submit_tx(&tx) {
            Ok(()) => stats.accepted(),
            Err(reason) => stats.rejected(reason.as_str()),
        }
    }
    stats
}

/// Impersonation attempts: an outsider substitutes their own key for the
/// victim's when trying to spend the victim's lock. Every variant dies at
/// the key-membership clause because the outsider's key was never
/// accumulated.
pub fn forge_impersonation_txs<G: Group>(
    chains: &mut [ChainState<G>],
    hub: &AccumulatorHub,
    terms: &SwapTerms<G>,
    sid: SessionId,
    victim: PartyId,
    trials: u32,
    seed: &[u8],
) -> ProbeStats {
    let mut stats = ProbeStats::default();
    let chain = victim.0 as usize;
    let message = terms.message_bytes(victim);
    let victim_pk = terms.pks[chain].clone();
    let n = terms.n();

    for j in 0..trials {
        let eve = KeyPair::<G>::generate(&derive_seed(seed, "eve-key", j as u64));
        let nonce = G::scalar_from_seed(&derive_seed(seed, "eve-nonce", j as u64));
        let nonce_point = G::Point::generator().mul(&nonce);
        let fake_adaptor =
            G::Point::generator().mul(&G::scalar_from_seed(&derive_seed(seed, "eve-t", j as u64)));

        // Eve signs the victim's message correctly under her own key, with
        // the genuine session digests, so only the accumulator check can
        // stop her.
        let kd = hub.keys_digest_bytes(sid).expect("registered");
        let md = hub.msgs_digest_bytes(sid).expect("registered");
        let mode = if n == 2 {
            ChallengeMode::Direct
        } else {
            ChallengeMode::Accumulated { keys_digest: &kd, msgs_digest: &md }
        };
        let challenge = compute_challenge::<G>(
            mode,
            &nonce_point.add(&fake_adaptor),
            eve.public(),
            &message,
        );
        let s_pre = nonce.add(&challenge.mul(eve.secret()));
        let t = G::scalar_from_seed(&derive_seed(seed, "eve-t", j as u64));
        let presig = PreSignature {
            party: victim,
            challenge: challenge.clone(),
            s: s_pre.clone(),
            nonce_point: nonce_point.clone(),
            adaptor_point: fake_adaptor.clone(),
        };
        let sig = FullSignature {
            party: victim,
            challenge,
            s: s_pre.add(&t),
            nonce_point,
            adaptor_point: fake_adaptor,
        };

        let key_witness = match j % 3 {
            // junk witness fabricated from a random exponent
            0 => crate::acc::MembershipWitness {
                cofactor: crate::acc::QrElement::generator(hub.params()).pow(
                    hub.params(),
                    &num_bigint::BigUint::from(j as u64 * 2 + 3),
                ),
            },
            // the victim's perfectly valid witness, for the wrong key
            1 => hub.witness_key(sid, &victim_pk.to_bytes()).expect("victim registered"),
            // a witness for Eve's key against a digest that never saw it
            _ => crate::acc::MembershipWitness {
                cofactor: crate::acc::QrElement::generator(hub.params()),
            },
        };

        let tx = ChainTx {
            session: sid,
            payer: victim,
            message: message.clone(),
            signer_key: eve.public().clone(),
            key_witness,
            presig: presig.clone(),
            presig_witness: crate::acc::MembershipWitness {
                cofactor: crate::acc::QrElement::generator(hub.params()),
            },
            signature: sig,
        };
        match chains[chain].submit_tx(&tx) {
            Ok(()) => stats.accepted(),
            Err(reason) => stats.rejected(reason.as_str()),
        }
    }
    stats
}

/// Standalone leak probe: builds an honest world, stops right before
/// finalization, leaks the bundle and adaptor point, and runs `trials`
/// forged completions. Returns the tally; a sound protocol accepts none.
pub fn leak_probe<G: Group>(
    seed: &[u8],
    n: u32,
    trials: u32,
    params: &RsaParams,
) -> ProbeStats {
    let w = HonestWorld::<G>::build(seed, n, params);
    let mut chains = w.chains;
    forge_completion_txs(
        &mut chains,
        &w.hub,
        &w.terms,
        w.sid,
        &w.bundle,
        &w.adaptor_point,
        trials,
        &derive_seed(seed, "leak-probe", 0),
    )
}

/// Standalone impersonation probe over an honest world.
pub fn impersonation_probe<G: Group>(
    seed: &[u8],
    n: u32,
    victim: PartyId,
    trials: u32,
    params: &RsaParams,
) -> ProbeStats {
    let w = HonestWorld::<G>::build(seed, n, params);
    let mut chains = w.chains;
    forge_impersonation_txs(
        &mut chains,
        &w.hub,
        &w.terms,
        w.sid,
        victim,
        trials,
        &derive_seed(seed, "impersonation-probe", 0),
    )
}

/// Standalone skipping probe: delivers mangled bundles (entries missing,
/// truncated, or reordered) to fresh recipients and tallies the rejection
/// reasons. A delivery that any recipient accepts counts as `accepted`.
pub fn skipping_probe<G: Group>(
    seed: &[u8],
    n: u32,
    trials: u32,
    params: &RsaParams,
) -> ProbeStats {
    assert!(n >= 3, "skipping needs an intermediate party");
    let w = HonestWorld::<G>::build(seed, n, params);

    // Fresh recipients that never advanced past setup; failed deliveries
    // leave them reusable.
    let mut recipients: Vec<SwapSession<G>> = (1..n)
        .map(|i| {
            SwapSession::new_participant(
                w.terms.clone(),
                PartyId(i),
                w.keypairs[i as usize].clone(),
                &w.ann,
                w.kd.clone(),
                w.md.clone(),
                &derive_seed(seed, "probe-nonce", i as u64),
            )
            .expect("participant setup")
        })
        .collect();

    let mut stats = ProbeStats::default();
    for j in 0..trials {
        let r = (j as usize % (n as usize - 1)) + 1;
        let mut mangled: Vec<PreSignature<G>> = w.bundle[..r].to_vec();
        let pick = derive_seed(seed, "mangle", j as u64);
        match j % 3 {
            // drop one predecessor entirely (the classic skip)
            0 => {
                let drop = pick[0] as usize % mangled.len();
                mangled.remove(drop);
            }
            // truncate the prefix
            1 => {
                let keep = pick[0] as usize % mangled.len();
                mangled.truncate(keep);
            }
            // swap two slots, keeping the length
            _ => {
                if mangled.len() >= 2 {
                    let a = pick[0] as usize % mangled.len();
                    let b = pick[1] as usize % mangled.len();
                    if a == b {
                        let b = (b + 1) % mangled.len();
                        mangled.swap(a, b);
                    } else {
                        mangled.swap(a, b);
                    }
                } else {
                    mangled.clear();
                }
            }
        }
        if mangled.len() == r && mangled.iter().enumerate().all(|(k, p)| p.party.0 as usize == k)
        {
            // mangling happened to restore the honest prefix; skip trial
            continue;
        }
        match recipients[r - 1].step(mangled) {
            Ok(_) => stats.accepted(),
            Err(e) => stats.rejected(session_error_code(&e)),
        }
    }
    stats
}

/// Honest pre-finalization world shared by the standalone probes: ring has
/// completed, locks are funded, nothing is finalized.
struct HonestWorld<G: Group> {
    terms: SwapTerms<G>,
    keypairs: Vec<KeyPair<G>>,
    ann: AdaptorAnnouncement<G>,
    kd: Vec<u8>,
    md: Vec<u8>,
    bundle: Vec<PreSignature<G>>,
    adaptor_point: G::Point,
    hub: AccumulatorHub,
    chains: Vec<ChainState<G>>,
    sid: SessionId,
}

impl<G: Group> HonestWorld<G> {
    fn build(seed: &[u8], n: u32, params: &RsaParams) -> Self {
        let keypairs: Vec<KeyPair<G>> = (0..n as u64)
            .map(|i| KeyPair::generate(&derive_seed(seed, "key", i)))
            .collect();
        let label = hash_transcript("scenario/label/v1", &[seed]);
        let terms = SwapTerms::<G>::new(
            label,
            keypairs.iter().map(|k| k.public().clone()).collect(),
            (0..n as u64).map(|i| 100 + i).collect(),
            vec![10; n as usize],
        )
        .expect("valid terms");
        let sid = terms.session_id();

        let mut hub = AccumulatorHub::new(params.clone());
        hub.register_session(
            sid,
            terms.pks.iter().map(|p| p.to_bytes()),
            (0..n).map(|i| terms.message_bytes(PartyId(i))),
        );
        let kd = hub.keys_digest_bytes(sid).expect("registered");
        let md = hub.msgs_digest_bytes(sid).expect("registered");

        let (mut initiator, ann) = SwapSession::new_initiator(
            terms.clone(),
            keypairs[0].clone(),
            kd.clone(),
            md.clone(),
            &derive_seed(seed, "adaptor", 0),
            &derive_seed(seed, "nonce", 0),
        )
        .expect("initiator setup");
        let adaptor_point = initiator.adaptor_point().clone();

        let mut bundle = initiator.start().expect("start");
        let mut others: Vec<SwapSession<G>> = (1..n)
            .map(|i| {
                SwapSession::new_participant(
                    terms.clone(),
                    PartyId(i),
                    keypairs[i as usize].clone(),
                    &ann,
                    kd.clone(),
                    md.clone(),
                    &derive_seed(seed, "nonce", i as u64),
                )
                .expect("participant setup")
            })
            .collect();
        for s in others.iter_mut() {
            bundle = s.step(bundle).expect("honest ring");
        }
        for p in &bundle {
            hub.record_presig(sid, &p.to_bytes());
        }

        let mut chains = Vec::new();
        for i in 0..n {
            let mut chain = ChainState::<G>::new(ChainId(i), params.clone());
            chain.sync_view(sid, hub.view(sid).expect("registered"));
            let payer = PartyId(i);
            let beneficiary = terms.beneficiary_of(payer);
            chain
                .create_lock(
                    sid,
                    payer,
                    terms.pks[i as usize].clone(),
                    terms.pks[beneficiary.0 as usize].clone(),
                    terms.amounts[i as usize],
                    terms.expiries[i as usize],
                    terms.message_bytes(payer),
                )
                .expect("fresh lock");
            chain.advance_height();
            chains.push(chain);
        }

        HonestWorld { terms, keypairs, ann, kd, md, bundle, adaptor_point, hub, chains, sid }
    }
}
