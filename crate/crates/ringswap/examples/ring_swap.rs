//! Five parties swap in a ring: party i pays party i+1 on chain i. One
//! adaptor secret gates all five legs, so the first on-chain completion
//! unlocks every other payment.

use ringswap::acc::RsaParams;
use ringswap::group::secp::Secp256k1Group;
use ringswap::scenario::{run_scenario, ScenarioSpec};

fn main() {
    let spec = ScenarioSpec::honest(5, b"ring-swap-example");
    let params = RsaParams::toy(b"ring-swap-example");
    let out = run_scenario::<Secp256k1Group>(&spec, &params);

    println!("verdict: {}", out.verdict);
    for (i, (delta, accepted)) in out.deltas.iter().zip(&out.accepted).enumerate() {
        println!("party {i}: delta {delta:+}, chain {i} accepted {accepted} tx");
    }
    assert_eq!(out.accepted, vec![1; 5], "exactly one spend per chain");
    assert_eq!(out.deltas.iter().sum::<i64>(), 0, "assets only move, never vanish");
}
