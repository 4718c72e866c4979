//! Every run serializes to a self-verifying transcript: JSON lines closed
//! by a hash chain. The verifier re-checks each signature, challenge, and
//! accumulator witness offline and pinpoints the first bad record.

use ringswap::acc::RsaParams;
use ringswap::group::tiny::TinyGroup;
use ringswap::scenario::{run_scenario, ScenarioSpec};
use ringswap::transcript::{render_transcript, verify_transcript};

fn main() {
    let spec = ScenarioSpec::honest(3, b"transcript-example");
    let params = RsaParams::toy(b"transcript-example");
    let out = run_scenario::<TinyGroup>(&spec, &params);

    let text = render_transcript(&out.records);
    println!("transcript: {} lines, {} bytes", text.lines().count(), text.len());

    let summary = verify_transcript(&text).unwrap();
    println!(
        "verified: group {}, {} parties, verdict {}",
        summary.group,
        summary.parties,
        summary.verdict.as_deref().unwrap_or("none")
    );

    // Determinism: the same spec reproduces the same bytes.
    let again = run_scenario::<TinyGroup>(&spec, &params);
    assert_eq!(text, render_transcript(&again.records));
    println!("rerun is byte-identical");

    // Tampering with any single byte is caught.
    let mut bytes = text.into_bytes();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x20;
    let err = verify_transcript(&String::from_utf8_lossy(&bytes)).unwrap_err();
    println!("flipped one byte: rejected at record {} ({})", err.record, err.message);
}
