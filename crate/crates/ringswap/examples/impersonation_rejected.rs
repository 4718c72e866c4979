//! Impersonation: an outsider signs a session message with her own key
//! and tries to spend a participant's lock. Chains check every signer key
//! against the session's key accumulator, so all variants die at the
//! membership clause no matter how well-formed the signature is.

use ringswap::acc::RsaParams;
use ringswap::group::tiny::TinyGroup;
use ringswap::scenario::impersonation_probe;
use ringswap::schnorr::PartyId;

fn main() {
    let params = RsaParams::toy(b"eve-example");
    let stats = impersonation_probe::<TinyGroup>(b"eve-fuzz", 3, PartyId(1), 300, &params);

    println!("{} forged spends submitted, {} accepted", stats.attempts, stats.accepted);
    for (reason, count) in &stats.rejections {
        println!("  rejected at {reason}: {count}");
    }
    assert_eq!(stats.accepted, 0);
    assert_eq!(
        stats.rejections.get("key-not-accumulated"),
        Some(&(stats.attempts)),
        "every impersonation dies at the key membership check"
    );
}
