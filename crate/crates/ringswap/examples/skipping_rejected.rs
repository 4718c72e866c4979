//! The skipping attack: the initiator forwards the pre-signature bundle
//! past an intermediate party. The first honest recipient checks that the
//! bundle holds one valid pre-signature per predecessor and rejects the
//! gap, so the swap dies cleanly and every lock refunds.

use ringswap::acc::RsaParams;
use ringswap::group::tiny::TinyGroup;
use ringswap::scenario::{run_scenario, skipping_probe, Behavior, ScenarioSpec, Verdict};
use ringswap::schnorr::PartyId;

fn main() {
    let params = RsaParams::toy(b"skip-example");

    let mut spec = ScenarioSpec::honest(4, b"skip-run");
    spec.behaviors[0] = Behavior::Skipper { target: PartyId(1) };
    let out = run_scenario::<TinyGroup>(&spec, &params);
    println!("initiator skipped party 1; verdict: {}", out.verdict);
    for (party, err) in &out.session_errors {
        println!("  party {} rejected: {err}", party.0);
    }
    assert_eq!(out.verdict, Verdict::NoneCompleted);

    // Randomized mangled bundles (entries dropped, truncated, swapped)
    // against fresh recipients: every single delivery is rejected.
    let stats = skipping_probe::<TinyGroup>(b"skip-fuzz", 4, 200, &params);
    println!("mangled deliveries: {} attempts, {} accepted", stats.attempts, stats.accepted);
    for (reason, count) in &stats.rejections {
        println!("  {reason}: {count}");
    }
    assert_eq!(stats.accepted, 0);
}
