//! Release gate. One test per acceptance criterion; each prints a single
//! `criterion N ...: PASS` line on success (visible with `--nocapture`),
//! and a failed assertion is the corresponding FAIL. Budgets are asserted
//! where the criterion carries one.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;

use ringswap::acc::{
    verify_batch_insert, verify_batch_remove, verify_membership, verify_multi_swap,
    verify_nonmembership, Accumulator, MembershipWitness, NonMembershipWitness, QrElement,
    RsaParams,
};
use ringswap::chain::{ChainState, ChainTx};
use ringswap::ecdsa;
use ringswap::group::secp::Secp256k1Group;
use ringswap::group::tiny::TinyGroup;
use ringswap::group::{derive_seed, Group, PointElement, ScalarElement};
use ringswap::protocol::{
    AccumulatorHub, ChainId, PreSigBundle, SessionError, SessionId, SwapSession, SwapTerms,
};
use ringswap::scenario::{
    impersonation_probe, leak_probe, run_scenario, skipping_probe, Behavior, ScenarioSpec, Verdict,
};
use ringswap::schnorr::{FullSignature, KeyPair, PartyId, PreSignature};
use ringswap::transcript::{render_transcript, verify_transcript};

fn realistic_params() -> &'static RsaParams {
    static PARAMS: OnceLock<RsaParams> = OnceLock::new();
    PARAMS.get_or_init(|| RsaParams::realistic(b"acceptance-shared-setup"))
}

/// Deterministic pseudo-random draw for sweeps.
fn roll(seed: &[u8], label: &str, i: u64) -> u64 {
    let b = derive_seed(seed, label, i);
    u64::from_le_bytes(b[..8].try_into().unwrap())
}

fn claim_tx<G: Group>(
    hub: &AccumulatorHub,
    terms: &SwapTerms<G>,
    sid: SessionId,
    payer: PartyId,
    presig: &PreSignature<G>,
    sig: FullSignature<G>,
) -> ChainTx<G> {
    let pk = terms.pks[payer.0 as usize].clone();
    ChainTx {
        session: sid,
        payer,
        message: terms.message_bytes(payer),
        signer_key: pk.clone(),
        key_witness: hub.witness_key(sid, &pk.to_bytes()).unwrap(),
        presig: presig.clone(),
        presig_witness: hub.witness_presig(sid, &presig.to_bytes()).unwrap(),
        signature: sig,
    }
}

/// Full two-party trace: pre-sign ring, finalize, cross-chain completion.
/// Asserts one accepted spend per chain and that the extracted secret opens
/// the announced adaptor point. Must finish inside one second.
#[test]
fn criterion_1_two_party_completion() {
    type G = Secp256k1Group;
    let seed = b"acceptance-c1";
    let params = RsaParams::toy(seed);

    let started = Instant::now();
    let alice = KeyPair::<G>::generate(&derive_seed(seed, "key", 0));
    let bob = KeyPair::<G>::generate(&derive_seed(seed, "key", 1));
    let terms = SwapTerms::<G>::new(
        *b"acceptance two-party trace c1..\0",
        vec![alice.public().clone(), bob.public().clone()],
        vec![500, 320],
        vec![10, 10],
    )
    .unwrap();
    let sid = terms.session_id();

    let mut hub = AccumulatorHub::new(params.clone());
    hub.register_session(
        sid,
        terms.pks.iter().map(|p| p.to_bytes()),
        (0..2).map(|i| terms.message_bytes(PartyId(i))),
    );
    let kd = hub.keys_digest_bytes(sid).unwrap();
    let md = hub.msgs_digest_bytes(sid).unwrap();

    let (mut alice_s, ann) = SwapSession::new_initiator(
        terms.clone(),
        alice,
        kd.clone(),
        md.clone(),
        &derive_seed(seed, "adaptor", 0),
        &derive_seed(seed, "nonce", 0),
    )
    .unwrap();
    let mut bob_s = SwapSession::new_participant(
        terms.clone(),
        PartyId(1),
        bob,
        &ann,
        kd,
        md,
        &derive_seed(seed, "nonce", 1),
    )
    .unwrap();
    let adaptor_point = alice_s.adaptor_point().clone();

    let bundle = alice_s.start().unwrap();
    let bundle = bob_s.step(bundle).unwrap();
    alice_s.accept_bundle(bundle.clone()).unwrap();
    for p in &bundle {
        hub.record_presig(sid, &p.to_bytes());
    }

    let mut chains: Vec<ChainState<G>> = (0..2)
        .map(|i| {
            let mut c = ChainState::new(ChainId(i), params.clone());
            c.sync_view(sid, hub.view(sid).unwrap());
            let payer = PartyId(i);
            let to = terms.beneficiary_of(payer);
            c.create_lock(
                sid,
                payer,
                terms.pks[i as usize].clone(),
                terms.pks[to.0 as usize].clone(),
                terms.amounts[i as usize],
                10,
                terms.message_bytes(payer),
            )
            .unwrap();
            c
        })
        .collect();

    let sig_a = alice_s.finalize().unwrap();
    let tx_a = claim_tx(&hub, &terms, sid, PartyId(0), &bundle[0], sig_a);
    chains[0].submit_tx(&tx_a).unwrap();
    chains[0].advance_height();

    let observed = chains[0].observe(0).next().unwrap().tx.signature.clone();
    let sig_b = bob_s.observe_and_complete(&observed).unwrap();
    let tx_b = claim_tx(&hub, &terms, sid, PartyId(1), &bundle[1], sig_b);
    chains[1].submit_tx(&tx_b).unwrap();
    chains[1].advance_height();
    let elapsed = started.elapsed();

    assert_eq!(chains[0].accepted_count(), 1);
    assert_eq!(chains[1].accepted_count(), 1);
    let t = bob_s.secret().expect("observer extracted the secret");
    assert_eq!(<G as Group>::Point::generator().mul(t), adaptor_point);
    assert_eq!(t.to_bytes(), alice_s.secret().unwrap().to_bytes());
    assert!(elapsed < Duration::from_secs(1), "trace took {elapsed:?}");
    println!("criterion 1 (two-party completion in {elapsed:?}): PASS");
}

/// Honest rings for every size from 2 to 8 on the production group with
/// full-width accumulator parameters: one spend per chain, and every
/// completed signature opens the same announced adaptor point (openings
/// are unique in a prime-order group, so all parties extract the same
/// secret). The 8-party run must finish inside five seconds.
#[test]
fn criterion_2_honest_rings_to_eight() {
    let params = realistic_params();
    let mut n8 = Duration::ZERO;
    for n in 2..=8u32 {
        let spec = ScenarioSpec::honest(n, format!("acceptance-c2-{n}").as_bytes());
        let started = Instant::now();
        let out = run_scenario::<Secp256k1Group>(&spec, params);
        let elapsed = started.elapsed();
        assert_eq!(out.verdict, Verdict::AllCompleted, "n={n}");
        assert_eq!(out.accepted, vec![1u64; n as usize], "n={n}");
        assert_eq!(out.deltas.iter().sum::<i64>(), 0, "n={n}");
        let text = render_transcript(&out.records);
        verify_transcript(&text).unwrap_or_else(|e| panic!("n={n}: {e}"));
        if n == 8 {
            n8 = elapsed;
        }
    }
    assert!(n8 < Duration::from_secs(5), "8-party run took {n8:?}");
    println!("criterion 2 (honest rings n=2..8, n=8 in {n8:?}): PASS");
}

/// Exhaustive dropout sweep for every ring size up to 5: each non-initiator
/// party independently honest, dropping after its own signature, or
/// dropping before it. Any pre-signature dropout must leave every chain
/// refunded with zero net movement; otherwise the rescue path must settle
/// every chain. No assignment may produce a violation verdict.
#[test]
fn criterion_3_dropout_sweep() {
    let params = RsaParams::toy(b"acceptance-c3-acc");
    let mut runs = 0u32;
    for n in 2..=5u32 {
        for assignment in 0..3u32.pow(n - 1) {
            let mut behaviors = vec![Behavior::Honest];
            let mut rest = assignment;
            let mut any_pre = false;
            for _ in 1..n {
                behaviors.push(match rest % 3 {
                    0 => Behavior::Honest,
                    1 => Behavior::DropoutAfterFinalize,
                    _ => {
                        any_pre = true;
                        Behavior::DropoutBeforeFinalize
                    }
                });
                rest /= 3;
            }
            let mut spec =
                ScenarioSpec::honest(n, format!("acceptance-c3-{n}-{assignment}").as_bytes());
            spec.behaviors = behaviors;
            spec.validate().unwrap();
            let out = run_scenario::<TinyGroup>(&spec, &params);
            assert_ne!(out.verdict, Verdict::Violation, "n={n} assignment={assignment}");
            if any_pre {
                assert_eq!(out.verdict, Verdict::NoneCompleted, "n={n} a={assignment}");
                assert!(out.accepted.iter().all(|&a| a == 0), "n={n} a={assignment}");
                assert!(out.deltas.iter().all(|&d| d == 0), "n={n} a={assignment}");
            } else {
                assert_eq!(out.verdict, Verdict::AllCompleted, "n={n} a={assignment}");
                assert_eq!(out.accepted, vec![1u64; n as usize], "n={n} a={assignment}");
            }
            runs += 1;
        }
    }
    println!("criterion 3 (dropout sweep, {runs} assignments, zero violations): PASS");
}

/// Bundle-skipping and impersonation rejection. Every omission variant of a
/// valid pre-signature prefix dies at the missing-predecessor check before
/// any signature math runs; every impersonated spend dies at the key
/// membership clause. A thousand randomized variants of each, plus a mixed
/// corruption probe, with zero acceptances anywhere.
#[test]
fn criterion_4_skipping_and_impersonation_rejected() {
    type G = TinyGroup;
    let seed = b"acceptance-c4";
    let params = RsaParams::toy(seed);
    let n = 5u32;

    let keypairs: Vec<KeyPair<G>> =
        (0..n as u64).map(|i| KeyPair::generate(&derive_seed(seed, "key", i))).collect();
    let terms = SwapTerms::<G>::new(
        *b"acceptance skipping sweep c4...\0",
        keypairs.iter().map(|k| k.public().clone()).collect(),
        (0..n as u64).map(|i| 100 + i).collect(),
        vec![10; n as usize],
    )
    .unwrap();
    let sid = terms.session_id();
    let mut hub = AccumulatorHub::new(params.clone());
    hub.register_session(
        sid,
        terms.pks.iter().map(|p| p.to_bytes()),
        (0..n).map(|i| terms.message_bytes(PartyId(i))),
    );
    let kd = hub.keys_digest_bytes(sid).unwrap();
    let md = hub.msgs_digest_bytes(sid).unwrap();

    let (mut initiator, ann) = SwapSession::new_initiator(
        terms.clone(),
        keypairs[0].clone(),
        kd.clone(),
        md.clone(),
        &derive_seed(seed, "adaptor", 0),
        &derive_seed(seed, "nonce", 0),
    )
    .unwrap();
    let participant = |i: u32| {
        SwapSession::new_participant(
            terms.clone(),
            PartyId(i),
            keypairs[i as usize].clone(),
            &ann,
            kd.clone(),
            md.clone(),
            &derive_seed(seed, "nonce", i as u64),
        )
        .unwrap()
    };

    // Honest prefixes: prefixes[r-1] is the valid delivery for party r.
    let mut ring: Vec<SwapSession<G>> = (1..n).map(participant).collect();
    let mut prefixes: Vec<PreSigBundle<G>> = Vec::new();
    let mut bundle = initiator.start().unwrap();
    prefixes.push(bundle.clone());
    for s in ring.iter_mut().take((n - 2) as usize) {
        bundle = s.step(bundle).unwrap();
        prefixes.push(bundle.clone());
    }

    // Fresh recipients, reusable because a refused delivery leaves the
    // session untouched.
    let mut recipients: Vec<SwapSession<G>> = (1..n).map(participant).collect();
    let trials = 1000u32;
    for j in 0..trials {
        let r = 1 + (j % (n - 1));
        let honest = &prefixes[(r - 1) as usize];
        assert_eq!(honest.len(), r as usize);
        // Drop a non-empty subset of the prefix, the classic skip included.
        let mask = 1 + (roll(seed, "mask", j as u64) % ((1 << r) - 1));
        let mangled: PreSigBundle<G> = honest
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 0)
            .map(|(_, p)| p.clone())
            .collect();
        let got = mangled.len();
        assert!(got < r as usize);
        let err = recipients[(r - 1) as usize].step(mangled).unwrap_err();
        assert_eq!(
            err,
            SessionError::MissingPredecessor { expected: r as usize, got },
            "skip variant {j} was not caught at the predecessor check"
        );
    }

    let imp = impersonation_probe::<G>(b"acceptance-c4-imp", 4, PartyId(2), trials, &params);
    assert_eq!(imp.attempts, trials as u64);
    assert_eq!(imp.accepted, 0);
    assert_eq!(imp.rejections.get("key-not-accumulated").copied(), Some(trials as u64));
    assert_eq!(imp.rejections.len(), 1, "unexpected rejection mix: {:?}", imp.rejections);

    // Mixed in-place corruption for good measure: still zero acceptances,
    // all failures at the predecessor or slot checks.
    let skip = skipping_probe::<G>(b"acceptance-c4-skip", n, trials, &params);
    assert_eq!(skip.accepted, 0);
    assert_eq!(skip.rejections.values().sum::<u64>(), skip.attempts);
    for reason in skip.rejections.keys() {
        assert!(
            reason == "missing-predecessor" || reason == "bad-pre-signature",
            "unexpected rejection {reason}"
        );
    }

    println!(
        "criterion 4 (skipping {trials}/{trials} missing-predecessor, \
         impersonation {trials}/{trials} key-membership): PASS"
    );
}

/// An adversary holding the complete pre-signature bundle and the adaptor
/// point before anyone finalizes gets nothing past any chain in a thousand
/// forgery trials on the production group, and the honest run still settles
/// afterwards.
#[test]
fn criterion_5_presignature_leak_safety() {
    let params = RsaParams::toy(b"acceptance-c5-acc");
    let trials = 1000u32;
    let stats = leak_probe::<Secp256k1Group>(b"acceptance-c5", 3, trials, &params);
    assert_eq!(stats.attempts, trials as u64);
    assert_eq!(stats.accepted, 0, "forgery accepted: {:?}", stats.rejections);
    assert_eq!(stats.rejections.values().sum::<u64>(), trials as u64);

    let mut spec = ScenarioSpec::honest(3, b"acceptance-c5-run");
    spec.behaviors[2] = Behavior::Leaker;
    spec.probe_trials = 64;
    spec.validate().unwrap();
    let out = run_scenario::<Secp256k1Group>(&spec, &params);
    assert_eq!(out.verdict, Verdict::AllCompleted);
    assert_eq!(out.accepted, vec![1, 1, 1]);

    println!("criterion 5 (leaked bundle, {trials} forgeries, zero accepted): PASS");
}

/// ECDSA adaptor round trip over a thousand random key/witness/message
/// triples: the pre-signature verifies, the adapted signature passes plain
/// verification, and extraction recovers the witness exactly.
#[test]
fn criterion_6_ecdsa_adaptor_round_trip() {
    type G = Secp256k1Group;
    let seed = b"acceptance-c6";
    for j in 0..1000u64 {
        let kp = KeyPair::<G>::generate(&derive_seed(seed, "key", j));
        let y = G::scalar_from_seed(&derive_seed(seed, "witness", j));
        let y_point = <G as Group>::Point::generator().mul(&y);
        let msg = derive_seed(seed, "msg", j);
        let pre = ecdsa::p_sign(&kp, &y_point, &msg, &derive_seed(seed, "nonce", j));
        assert!(ecdsa::p_vrfy(kp.public(), &y_point, &msg, &pre), "triple {j}: pVrfy");
        let sig = ecdsa::adapt(&pre, &y).expect("witness is invertible");
        assert!(ecdsa::verify(kp.public(), &msg, &sig), "triple {j}: verify(adapt)");
        let recovered = ecdsa::ext(&sig, &pre, &y_point).expect("extraction");
        assert_eq!(recovered.to_bytes(), y.to_bytes(), "triple {j}: ext");
    }
    println!("criterion 6 (1000 ECDSA adaptor triples): PASS");
}

/// Accumulator behavior against brute-force recomputation: 200 random
/// multiset operations tracked against an independent model, ten thousand
/// membership and non-membership witness checks with honest witnesses
/// always accepted and mutated ones never, and batched proofs whose
/// verification exponent stays bounded regardless of batch size.
#[test]
fn criterion_7_accumulator_soundness() {
    let seed = b"acceptance-c7";
    let params = RsaParams::toy(seed);
    let pool: Vec<Vec<u8>> =
        (0..24u64).map(|i| derive_seed(seed, "elem", i).to_vec()).collect();

    // Oracle digest straight from the multiset algebra: one big product
    // exponent, no incremental updates.
    let oracle = |model: &BTreeMap<Vec<u8>, u64>| -> QrElement {
        let mut x = BigUint::one();
        for (e, c) in model {
            x *= params.element_prime(e).pow(*c as u32);
        }
        QrElement::generator(&params).pow(&params, &x)
    };

    let mut acc = Accumulator::new(params.clone());
    let mut model: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let present = |m: &BTreeMap<Vec<u8>, u64>, k: u64| -> Option<Vec<u8>> {
        if m.is_empty() {
            return None;
        }
        m.keys().nth(k as usize % m.len()).cloned()
    };
    for i in 0..200u64 {
        match roll(seed, "op", i) % 10 {
            0..=3 => {
                let e = &pool[(roll(seed, "pick", i) % pool.len() as u64) as usize];
                acc.insert(e);
                *model.entry(e.clone()).or_insert(0) += 1;
            }
            4..=5 => match present(&model, roll(seed, "pick", i)) {
                Some(e) => {
                    acc.remove(&e).unwrap();
                    let c = model.get_mut(&e).unwrap();
                    *c -= 1;
                    if *c == 0 {
                        model.remove(&e);
                    }
                }
                None => {
                    let e = &pool[0];
                    acc.insert(e);
                    *model.entry(e.clone()).or_insert(0) += 1;
                }
            },
            6..=7 => {
                let k = 1 + roll(seed, "klen", i) % 5;
                let batch: Vec<Vec<u8>> = (0..k)
                    .map(|j| pool[(roll(seed, "bpick", i * 8 + j) % pool.len() as u64) as usize].clone())
                    .collect();
                let update = acc.batch_insert(&batch);
                for e in &batch {
                    *model.entry(e.clone()).or_insert(0) += 1;
                }
                let out = verify_batch_insert(
                    &params,
                    &update.old_digest,
                    &update.new_digest,
                    &batch,
                    &update.proof,
                );
                assert!(out.valid, "op {i}: batch proof");
            }
            _ => {
                let mut removals = Vec::new();
                let mut scratch = model.clone();
                for j in 0..roll(seed, "rlen", i) % 3 {
                    if let Some(e) = present(&scratch, roll(seed, "rpick", i * 8 + j)) {
                        let c = scratch.get_mut(&e).unwrap();
                        *c -= 1;
                        if *c == 0 {
                            scratch.remove(&e);
                        }
                        removals.push(e);
                    }
                }
                let insertions: Vec<Vec<u8>> = if roll(seed, "ident", i) % 4 == 0 {
                    removals.clone()
                } else {
                    (0..roll(seed, "ilen", i) % 3)
                        .map(|j| {
                            pool[(roll(seed, "ipick", i * 8 + j) % pool.len() as u64) as usize]
                                .clone()
                        })
                        .collect()
                };
                let update = acc.multi_swap(&removals, &insertions).unwrap();
                for e in &removals {
                    let c = model.get_mut(e).unwrap();
                    *c -= 1;
                    if *c == 0 {
                        model.remove(e);
                    }
                }
                for e in &insertions {
                    *model.entry(e.clone()).or_insert(0) += 1;
                }
                let out = verify_multi_swap(&params, &update, &removals, &insertions);
                assert!(out.valid, "op {i}: swap proof");
            }
        }
        assert_eq!(*acc.digest(), oracle(&model), "digest diverged after op {i}");
        assert_eq!(acc.len(), model.values().sum::<u64>(), "size diverged after op {i}");
    }

    // Witness fuzz over a fixed snapshot: half the pool present, half absent.
    let mut snap = Accumulator::new(params.clone());
    for e in &pool[..12] {
        snap.insert(e);
    }
    let g = QrElement::generator(&params);
    for j in 0..10_000u64 {
        if j % 2 == 0 {
            let e = &pool[(roll(seed, "fuzz-in", j) % 12) as usize];
            let w = snap.prove_membership(e).unwrap();
            assert!(verify_membership(&params, snap.digest(), e, &w), "fuzz {j}: honest");
            let bad = MembershipWitness {
                cofactor: w.cofactor.mul(
                    &params,
                    &g.pow(&params, &BigUint::from(1 + roll(seed, "fuzz-mut", j) % 97)),
                ),
            };
            assert!(!verify_membership(&params, snap.digest(), e, &bad), "fuzz {j}: mutated");
        } else {
            let e = &pool[12 + (roll(seed, "fuzz-out", j) % 12) as usize];
            let w = snap.prove_nonmembership(e).unwrap();
            assert!(verify_nonmembership(&params, snap.digest(), e, &w), "fuzz {j}: honest");
            let bad = NonMembershipWitness {
                a: w.a.clone(),
                b_elem: w.b_elem.mul(&params, &g),
            };
            assert!(!verify_nonmembership(&params, snap.digest(), e, &bad), "fuzz {j}: mutated");
        }
    }

    // Constant-size verification: the checked exponent is one hash prime
    // plus a remainder below it, whatever the batch size.
    let bound = 2 * u64::from(params.prime_bits);
    let mut observed = Vec::new();
    for k in [1usize, 10, 50, 100] {
        let mut acc2 = Accumulator::new(params.clone());
        let batch: Vec<Vec<u8>> = (0..k)
            .map(|i| derive_seed(seed, "poe", (k * 1000 + i) as u64).to_vec())
            .collect();
        let ins = acc2.batch_insert(&batch);
        let out =
            verify_batch_insert(&params, &ins.old_digest, &ins.new_digest, &batch, &ins.proof);
        assert!(out.valid);
        assert!(out.exponent_bits <= bound, "k={k}: {} bits", out.exponent_bits);
        let rm = acc2.batch_remove(&batch).unwrap();
        let out =
            verify_batch_remove(&params, &rm.old_digest, &rm.new_digest, &batch, &rm.proof);
        assert!(out.valid);
        assert!(out.exponent_bits <= bound, "k={k}: {} bits", out.exponent_bits);
        observed.push(out.exponent_bits);
    }
    // The naive exponent for k = 100 would be about 100 primes wide.
    assert!(observed[3] <= bound && bound < 100 * u64::from(params.prime_bits));

    println!("criterion 7 (200-op oracle match, 10000 witness fuzz, bounded PoE): PASS");
}

/// MultiSwap against the multiset algebra itself: 500 random swap lists,
/// duplicates and identity swaps included, each compared to a digest
/// computed from scratch out of the tracked multiset, with both chained
/// proofs verifying.
#[test]
fn criterion_8_multiswap_matches_multiset_algebra() {
    let seed = b"acceptance-c8";
    let params = RsaParams::toy(seed);
    let pool: Vec<Vec<u8>> =
        (0..16u64).map(|i| derive_seed(seed, "elem", i).to_vec()).collect();

    let oracle = |model: &BTreeMap<Vec<u8>, u64>| -> QrElement {
        let mut x = BigUint::one();
        for (e, c) in model {
            x *= params.element_prime(e).pow(*c as u32);
        }
        QrElement::generator(&params).pow(&params, &x)
    };

    let mut acc = Accumulator::new(params.clone());
    let mut model: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for i in 0..10usize {
        // Duplicate starting content on purpose.
        let e = &pool[i % 6];
        acc.insert(e);
        *model.entry(e.clone()).or_insert(0) += 1;
    }

    let mut identity_swaps = 0u32;
    for i in 0..500u64 {
        let mut removals = Vec::new();
        let mut scratch = model.clone();
        for j in 0..roll(seed, "rlen", i) % 4 {
            if scratch.is_empty() {
                break;
            }
            let pick = roll(seed, "rpick", i * 8 + j) as usize % scratch.len();
            let e = scratch.keys().nth(pick).cloned().unwrap();
            let c = scratch.get_mut(&e).unwrap();
            *c -= 1;
            if *c == 0 {
                scratch.remove(&e);
            }
            removals.push(e);
        }
        let insertions: Vec<Vec<u8>> = if roll(seed, "ident", i) % 5 == 0 {
            identity_swaps += 1;
            removals.clone()
        } else {
            (0..roll(seed, "ilen", i) % 4)
                .map(|j| pool[(roll(seed, "ipick", i * 8 + j) % pool.len() as u64) as usize].clone())
                .collect()
        };

        let before = acc.digest().clone();
        let update = acc.multi_swap(&removals, &insertions).unwrap();
        for e in &removals {
            let c = model.get_mut(e).unwrap();
            *c -= 1;
            if *c == 0 {
                model.remove(e);
            }
        }
        for e in &insertions {
            *model.entry(e.clone()).or_insert(0) += 1;
        }

        assert_eq!(*acc.digest(), oracle(&model), "swap {i} diverged from the algebra");
        if insertions == removals {
            assert_eq!(*acc.digest(), before, "identity swap {i} moved the digest");
        }
        let out = verify_multi_swap(&params, &update, &removals, &insertions);
        assert!(out.valid, "swap {i}: proof");
    }
    assert!(identity_swaps >= 50, "sweep produced too few identity swaps");
    println!(
        "criterion 8 (500 swaps vs multiset algebra, {identity_swaps} identity swaps): PASS"
    );
}

/// Determinism and tamper evidence. The same seed renders byte-identical
/// transcripts across the scenario matrix and every one re-verifies
/// offline; flipping any single byte of a transcript is detected; the
/// installed binary round-trips run and verify with the documented exit
/// codes.
#[test]
fn criterion_9_deterministic_verifiable_transcripts() {
    let params = RsaParams::toy(b"acceptance-c9-acc");

    let mut matrix: Vec<ScenarioSpec> = vec![
        ScenarioSpec::honest(2, b"acceptance-c9-h2"),
        ScenarioSpec::honest(4, b"acceptance-c9-h4"),
    ];
    let mut pre = ScenarioSpec::honest(3, b"acceptance-c9-pre");
    pre.behaviors[1] = Behavior::DropoutBeforeFinalize;
    matrix.push(pre);
    let mut post = ScenarioSpec::honest(3, b"acceptance-c9-post");
    post.behaviors[2] = Behavior::DropoutAfterFinalize;
    matrix.push(post);
    let mut skip = ScenarioSpec::honest(4, b"acceptance-c9-skip");
    skip.behaviors[1] = Behavior::Skipper { target: PartyId(2) };
    matrix.push(skip);
    let mut imp = ScenarioSpec::honest(3, b"acceptance-c9-imp");
    imp.behaviors[2] = Behavior::Impersonator { victim: PartyId(0) };
    matrix.push(imp);
    let mut leak = ScenarioSpec::honest(3, b"acceptance-c9-leak");
    leak.behaviors[1] = Behavior::Leaker;
    matrix.push(leak);

    let mut smallest: Option<String> = None;
    for spec in &matrix {
        spec.validate().unwrap();
        let first = render_transcript(&run_scenario::<TinyGroup>(spec, &params).records);
        let second = render_transcript(&run_scenario::<TinyGroup>(spec, &params).records);
        assert_eq!(first, second, "transcript is not a pure function of the seed");
        verify_transcript(&first).unwrap();
        if smallest.as_ref().is_none_or(|s| first.len() < s.len()) {
            smallest = Some(first);
        }
    }

    let text = smallest.unwrap();
    let bytes = text.as_bytes();
    for pos in 0..bytes.len() {
        let mut mutated = bytes.to_vec();
        mutated[pos] ^= 0x01;
        let mutated = String::from_utf8(mutated).unwrap();
        assert!(
            verify_transcript(&mutated).is_err(),
            "flip at byte {pos} of {} went undetected",
            bytes.len()
        );
    }

    // Process-level round trip with the documented exit codes.
    let exe = env!("CARGO_BIN_EXE_ringswap");
    let dir = tempfile::tempdir().unwrap();
    let transcript_path = dir.path().join("run.transcript");
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        format!(
            "group = \"tiny\"\naccumulator = \"toy\"\nseed = \"6163632d6339\"\n\
             parties = 3\ntranscript = {:?}\n",
            transcript_path
        ),
    )
    .unwrap();
    let run = std::process::Command::new(exe).args(["run", config_path.to_str().unwrap()]).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let verify = std::process::Command::new(exe)
        .args(["verify", transcript_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(0), "{}", String::from_utf8_lossy(&verify.stderr));

    let mut tampered = std::fs::read(&transcript_path).unwrap();
    let mid = tampered.len() / 2;
    tampered[mid] ^= 0x01;
    let tampered_path = dir.path().join("tampered.transcript");
    std::fs::write(&tampered_path, &tampered).unwrap();
    let bad = std::process::Command::new(exe)
        .args(["verify", tampered_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = std::process::Command::new(exe)
        .args(["verify", dir.path().join("nope").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    println!(
        "criterion 9 (byte-identical reruns, {}-byte mutation sweep, cli round trip): PASS",
        bytes.len()
    );
}
