//! The RSA multiset accumulator: constant-size digests with membership
//! and non-membership witnesses, batched updates under a single succinct
//! proof of exponentiation, and the composed remove-then-insert MultiSwap.

use ringswap::acc::{
    verify_batch_insert, verify_membership, verify_multi_swap, verify_nonmembership, Accumulator,
    RsaParams,
};

fn main() {
    let params = RsaParams::toy(b"accumulator-example");
    let mut acc = Accumulator::new(params.clone());

    acc.insert(b"alice");
    acc.insert(b"bob");
    acc.insert(b"carol");
    println!("digest over 3 names: {}", hex::encode(acc.digest().to_bytes(&params)));

    // Membership: a cofactor witness, one exponentiation to check.
    let w = acc.prove_membership(b"bob").unwrap();
    assert!(verify_membership(&params, acc.digest(), b"bob", &w));
    assert!(!verify_membership(&params, acc.digest(), b"mallory", &w));
    println!("bob is in; the same witness says nothing about mallory");

    // Non-membership: Bezout coefficients over the element primes.
    let nw = acc.prove_nonmembership(b"mallory").unwrap();
    assert!(verify_nonmembership(&params, acc.digest(), b"mallory", &nw));
    println!("mallory is provably absent");
    assert!(acc.prove_nonmembership(b"alice").is_err(), "members get no absence proof");

    // Batch insertion: one proof regardless of how many elements land.
    let batch: Vec<Vec<u8>> = (0..40).map(|i| format!("guest-{i}").into_bytes()).collect();
    let update = acc.batch_insert(&batch);
    let outcome = verify_batch_insert(&params, &update.old_digest, &update.new_digest, &batch, &update.proof);
    assert!(outcome.valid);
    println!(
        "inserted {} elements; verifier exponent stayed at {} bits",
        batch.len(),
        outcome.exponent_bits
    );

    // MultiSwap: remove one set, insert another, digests chained.
    let removals: Vec<Vec<u8>> = vec![b"alice".to_vec(), b"guest-7".to_vec()];
    let insertions: Vec<Vec<u8>> = vec![b"dave".to_vec(), b"erin".to_vec()];
    let swap = acc.multi_swap(&removals, &insertions).unwrap();
    let outcome = verify_multi_swap(&params, &swap, &removals, &insertions);
    assert!(outcome.valid);
    println!("swapped {{alice, guest-7}} for {{dave, erin}}: both proofs verify");

    // The digest only depends on the final multiset, not on the path.
    let mut fresh = Accumulator::new(params.clone());
    fresh.insert(b"bob");
    fresh.insert(b"carol");
    fresh.insert(b"dave");
    fresh.insert(b"erin");
    for (i, g) in batch.iter().enumerate() {
        if i != 7 {
            fresh.insert(g);
        }
    }
    assert_eq!(fresh.digest(), acc.digest());
    println!("recomputed-from-scratch digest matches");
}
