//! Multi-party atomic swaps on adaptor signatures, plus a deterministic
//! multi-chain simulator to exercise them.
//!
//! A ring of `n` parties, each paying the next on its own chain, shares a
//! single adaptor secret: every party pre-signs its payment so that all
//! pre-signatures open under the same secret. Publishing any one completed
//! signature reveals the secret to everyone, so either every payment can be
//! completed or none can. Chains check spends against an RSA multiset
//! accumulator of session keys and pre-signatures, which is what defeats
//! impersonation and bundle skipping.
//!
//! The quickest way in is the `examples/` directory; each example is a
//! runnable walkthrough of one capability:
//!
//! * `two_party_swap`: the whole protocol by hand, Alice and Bob.
//! * `ring_swap`: a five-party ring through the scenario runner.
//! * `dropout_rescue`: dropouts before and after the secret is public.
//! * `skipping_rejected`: mangled pre-signature bundles at delivery.
//! * `impersonation_rejected`: spends under unregistered keys.
//! * `leak_safety`: forgery attempts from a leaked bundle.
//! * `accumulator`: membership, non-membership, batching, MultiSwap.
//! * `ecdsa_adaptor`: the ECDSA variant of the adaptor scheme.
//! * `transcript_verify`: sealed run transcripts and offline checking.
//!
//! Module map: [`group`] abstracts the curve (secp256k1 and a tiny group
//! for exhaustive tests), [`schnorr`] and [`ecdsa`] hold the two adaptor
//! schemes, [`acc`] the accumulator, [`protocol`] the swap sessions and
//! the accumulator hub, [`chain`] the simulated chains and their
//! verification rule, [`scenario`] scripted runs with adversarial
//! behaviors, [`transcript`] the sealed run log, and [`cli`] a small
//! command line front end (`run`, `verify`, `acc-demo`, `keygen`) driving
//! all of it.
//!
//! Everything is deterministic: all randomness is derived from caller
//! seeds, identical seeds give byte-identical transcripts.

pub mod acc;
pub mod chain;
pub mod cli;
pub mod ecdsa;
pub mod group;
pub mod protocol;
pub mod scenario;
pub mod schnorr;
pub mod transcript;
