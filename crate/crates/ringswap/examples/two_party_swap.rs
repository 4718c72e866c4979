//! Alice and Bob swap assets across two chains with a shared adaptor
//! secret: Alice pre-signs, Bob pre-signs, Alice finalizes on chain 0, and
//! Bob completes on chain 1 by extracting the secret from her published
//! signature.

use ringswap::acc::RsaParams;
use ringswap::chain::{ChainState, ChainTx};
use ringswap::group::secp::Secp256k1Group;
use ringswap::group::{derive_seed, Group, PointElement};
use ringswap::protocol::{AccumulatorHub, ChainId, SessionId, SwapSession, SwapTerms};
use ringswap::schnorr::{FullSignature, KeyPair, PartyId, PreSignature};

type G = Secp256k1Group;

fn claim(
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

fn main() {
    let seed = b"two-party-example";
    let alice = KeyPair::<G>::generate(&derive_seed(seed, "key", 0));
    let bob = KeyPair::<G>::generate(&derive_seed(seed, "key", 1));

    let terms = SwapTerms::<G>::new(
        *b"alice<->bob booking reference 01",
        vec![alice.public().clone(), bob.public().clone()],
        vec![500, 320],
        vec![10, 10],
    )
    .unwrap();
    let sid = terms.session_id();
    println!("session {sid}");

    let mut hub = AccumulatorHub::new(RsaParams::toy(seed));
    hub.register_session(
        sid,
        terms.pks.iter().map(|p| p.to_bytes()),
        (0..2).map(|i| terms.message_bytes(PartyId(i))),
    );
    let kd = hub.keys_digest_bytes(sid).unwrap();
    let md = hub.msgs_digest_bytes(sid).unwrap();

    // Alice holds the adaptor secret t; everyone sees only T = tG.
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

    let bundle = alice_s.start().unwrap();
    println!("alice pre-signed ({} bytes)", bundle[0].to_bytes().len());
    let bundle = bob_s.step(bundle).unwrap();
    println!("bob verified alice and pre-signed");
    alice_s.accept_bundle(bundle.clone()).unwrap();
    for p in &bundle {
        hub.record_presig(sid, &p.to_bytes());
    }

    // Two chains, one lock per direction.
    let mut chains: Vec<ChainState<G>> = (0..2)
        .map(|i| {
            let mut c = ChainState::new(ChainId(i), hub.params().clone());
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
    let tx_a = claim(&hub, &terms, sid, PartyId(0), &bundle[0], sig_a.clone());
    chains[0].submit_tx(&tx_a).unwrap();
    chains[0].advance_height();
    println!("chain 0 accepted alice's spend");

    // Bob reads chain 0, extracts t, and completes his own signature.
    let observed = chains[0].observe(0).next().unwrap().tx.signature.clone();
    let sig_b = bob_s.observe_and_complete(&observed).unwrap();
    let tx_b = claim(&hub, &terms, sid, PartyId(1), &bundle[1], sig_b);
    chains[1].submit_tx(&tx_b).unwrap();
    chains[1].advance_height();
    println!("chain 1 accepted bob's spend");

    let t = bob_s.secret().unwrap();
    assert_eq!(
        &<G as Group>::Point::generator().mul(t),
        alice_s.adaptor_point(),
        "extracted secret must open the announced adaptor point"
    );
    println!("bob's extracted secret opens T: swap is atomic");
}
