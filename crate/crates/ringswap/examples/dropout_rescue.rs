//! A malicious dropout after finalization cannot strand anyone: the
//! dropped party's pre-signature is public, the secret is extractable from
//! any completed signature, so the remaining parties finish the swap.
//! A dropout before finalization stalls the ring and every lock refunds.

use ringswap::acc::RsaParams;
use ringswap::group::tiny::TinyGroup;
use ringswap::scenario::{run_scenario, Behavior, ScenarioSpec, Verdict};

fn main() {
    let params = RsaParams::toy(b"dropout-example");

    // Carol signs, then vanishes. Alice finalizes; Bob completes by
    // observation; Carol's outgoing payment is completed for her
    // beneficiary with the public bundle.
    let mut spec = ScenarioSpec::honest(3, b"dropout-post");
    spec.behaviors[2] = Behavior::DropoutAfterFinalize;
    let out = run_scenario::<TinyGroup>(&spec, &params);
    println!("dropout after finalization: {}", out.verdict);
    println!("  accepted per chain: {:?}", out.accepted);
    assert_eq!(out.verdict, Verdict::AllCompleted);

    // Bob never contributes his pre-signature: nothing can finalize, the
    // clock runs out, and all three locks refund. Nobody loses funds.
    let mut spec = ScenarioSpec::honest(3, b"dropout-pre");
    spec.behaviors[1] = Behavior::DropoutBeforeFinalize;
    let out = run_scenario::<TinyGroup>(&spec, &params);
    println!("dropout before finalization: {}", out.verdict);
    println!("  deltas: {:?}", out.deltas);
    assert_eq!(out.verdict, Verdict::NoneCompleted);
    assert_eq!(out.deltas, vec![0, 0, 0]);
}
