//! Leaking every pre-signature plus the adaptor point before finalization
//! gains an adversary nothing: completing any leg still requires the
//! secret behind the adaptor point, which only the initiator holds until
//! a real signature lands on-chain.

use ringswap::acc::RsaParams;
use ringswap::group::tiny::TinyGroup;
use ringswap::scenario::{leak_probe, run_scenario, Behavior, ScenarioSpec, Verdict};

fn main() {
    let params = RsaParams::toy(b"leak-example");

    // Standalone probe: honest world paused right before finalization, the
    // whole bundle and T leaked, hundreds of forged completions attempted.
    let stats = leak_probe::<TinyGroup>(b"leak-fuzz", 3, 300, &params);
    println!("{} forged completions, {} accepted", stats.attempts, stats.accepted);
    for (reason, count) in &stats.rejections {
        println!("  rejected: {reason} x{count}");
    }
    assert_eq!(stats.accepted, 0);

    // Inside a full run the leak changes nothing for honest parties.
    let mut spec = ScenarioSpec::honest(3, b"leak-run");
    spec.behaviors[1] = Behavior::Leaker;
    spec.probe_trials = 50;
    let out = run_scenario::<TinyGroup>(&spec, &params);
    println!("run with a leaking party: {}", out.verdict);
    assert_eq!(out.verdict, Verdict::AllCompleted);
}
