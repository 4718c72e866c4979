//! The ECDSA adaptor scheme: pSign produces a pre-signature tied to a
//! statement point Y, pVrfy checks it without the witness, Adapt completes
//! it with y, the result passes textbook ECDSA verification, and Ext
//! recovers y from the (pre-signature, signature) pair.

use ringswap::ecdsa::{adapt, ext, p_sign, p_vrfy, verify};
use ringswap::group::secp::Secp256k1Group;
use ringswap::group::{derive_seed, Group, PointElement};
use ringswap::schnorr::KeyPair;

type G = Secp256k1Group;

fn main() {
    let signer = KeyPair::<G>::generate(&derive_seed(b"ecdsa-example", "key", 0));
    let witness = G::scalar_from_seed(&derive_seed(b"ecdsa-example", "witness", 0));
    let statement = <G as Group>::Point::generator().mul(&witness);
    let msg = b"pay 1 coin to carol once y is known";

    let pre = p_sign(&signer, &statement, msg, &derive_seed(b"ecdsa-example", "nonce", 0));
    assert!(p_vrfy(signer.public(), &statement, msg, &pre));
    println!("pre-signature verifies against the statement point");

    // Without y the pre-signature is not a signature.
    let unadapted =
        ringswap::ecdsa::EcdsaSignature::<G> { r: pre.r.clone(), s: pre.s_hat.clone() };
    assert!(!verify(signer.public(), msg, &unadapted));

    let sig = adapt(&pre, &witness).unwrap();
    assert!(verify(signer.public(), msg, &sig));
    println!("adapted signature passes plain ECDSA verification");

    let recovered = ext(&sig, &pre, &statement).unwrap();
    assert_eq!(recovered, witness);
    println!("witness recovered from the published signature");
}
