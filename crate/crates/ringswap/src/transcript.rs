//! Self-verifying run transcripts.
//!
//! A transcript is a JSON-lines file: one record per line, closed by an
//! `end` record carrying a SHA-256 hash chained over every preceding line.
//! Every cryptographic object in it (keys, pre-signatures, completed
//! signatures, accumulator digests, membership witnesses) carries enough
//! context to re-verify offline, so [`verify_transcript`] re-checks the
//! whole run without any live session state. Failures report the 1-based
//! record index.

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use num_bigint::BigUint;

use crate::acc::{verify_membership, Accumulator, MembershipWitness, QrElement, RsaParams};
use crate::ecdsa::{verify_dlog, DlogProof};
use crate::group::secp::Secp256k1Group;
use crate::group::tiny::TinyGroup;
use crate::group::{Group, PointElement, ScalarElement};
use crate::schnorr::{
    compute_challenge, extract_secret, pre_verify, verify_full, ChallengeMode, FullSignature,
    PartyId, PreSignature,
};

pub const TRANSCRIPT_VERSION: u32 = 1;

/// One transcript line.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Record {
    Header {
        version: u32,
        group: String,
        parties: u32,
        seed: String,
        config_hash: String,
    },
    AccParams {
        modulus: String,
        generator: String,
        prime_bits: u32,
        mr_rounds: u32,
    },
    Terms {
        label: String,
        session: String,
        pks: Vec<String>,
        amounts: Vec<u64>,
        expiries: Vec<u64>,
    },
    Adaptor {
        point: String,
        pok_a: String,
        pok_z: String,
    },
    Digests {
        keys: String,
        msgs: String,
    },
    PreSig {
        party: u32,
        bytes: String,
    },
    PresigAcc {
        digest: String,
    },
    ProtocolReject {
        party: u32,
        error: String,
    },
    Finalize {
        sig: String,
    },
    Complete {
        party: u32,
        sig: String,
    },
    TxAccepted {
        chain: u32,
        height: u64,
        payer: u32,
        key_witness: String,
        presig_witness: String,
        sig: String,
    },
    TxRejected {
        chain: u32,
        payer: u32,
        reason: String,
    },
    Probe {
        name: String,
        attempts: u64,
        accepted: u64,
        rejections: Vec<(String, u64)>,
    },
    ChainLog {
        chain: u32,
        lines: Vec<String>,
    },
    Verdict {
        verdict: String,
        deltas: Vec<i64>,
        accepted: Vec<u64>,
    },
    End {
        records: u64,
        chain_hash: String,
    },
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("transcript record {record}: {message}")]
pub struct TranscriptError {
    /// 1-based line index; 0 for file-level problems.
    pub record: usize,
    pub message: String,
}

fn fail<T>(record: usize, message: impl Into<String>) -> Result<T, TranscriptError> {
    Err(TranscriptError { record, message: message.into() })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifySummary {
    pub records: usize,
    pub group: String,
    pub parties: u32,
    pub verdict: Option<String>,
}

pub fn hex_of(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

fn unhex(record: usize, field: &str, s: &str) -> Result<Vec<u8>, TranscriptError> {
    hex::decode(s).map_err(|_| TranscriptError {
        record,
        message: format!("field {field} is not valid hex"),
    })
}

/// Serialize records to transcript text, appending the closing `end`
/// record with the chained hash.
pub fn render_transcript(records: &[Record]) -> String {
    let mut out = String::new();
    let mut hasher = Sha256::new();
    for rec in records {
        let line = serde_json::to_string(rec).expect("records serialize");
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        out.push_str(&line);
        out.push('\n');
    }
    let end = Record::End {
        records: records.len() as u64,
        chain_hash: hex::encode(hasher.finalize()),
    };
    out.push_str(&serde_json::to_string(&end).expect("records serialize"));
    out.push('\n');
    out
}

/// Parse transcript text into records without verifying anything beyond
/// JSON well-formedness.
pub fn parse_transcript(text: &str) -> Result<Vec<Record>, TranscriptError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            return fail(i + 1, "blank line inside transcript");
        }
        let rec: Record = serde_json::from_str(line)
            .map_err(|e| TranscriptError { record: i + 1, message: format!("parse error: {e}") })?;
        records.push(rec);
    }
    if records.is_empty() {
        return fail(0, "empty transcript");
    }
    Ok(records)
}

/// Full offline verification: structure, hash chain, and every
/// cryptographic statement the transcript makes.
pub fn verify_transcript(text: &str) -> Result<VerifySummary, TranscriptError> {
    let lines: Vec<&str> = text.lines().collect();
    let records = parse_transcript(text)?;

    // The closing record must exist and seal all prior lines.
    let last = records.len() - 1;
    let Record::End { records: count, chain_hash } = &records[last] else {
        return fail(records.len(), "missing end record");
    };
    if *count != last as u64 {
        return fail(records.len(), format!("end record counts {count}, found {last}"));
    }
    let mut hasher = Sha256::new();
    for line in &lines[..last] {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    if hex::encode(hasher.finalize()) != *chain_hash {
        return fail(records.len(), "hash chain mismatch: transcript was modified");
    }
    for (i, rec) in records[..last].iter().enumerate() {
        if matches!(rec, Record::End { .. }) {
            return fail(i + 1, "end record before end of file");
        }
    }

    let Record::Header { version, group, parties, .. } = &records[0] else {
        return fail(1, "first record must be a header");
    };
    if *version != TRANSCRIPT_VERSION {
        return fail(1, format!("unsupported transcript version {version}"));
    }
    match group.as_str() {
        "tiny" => verify_body::<TinyGroup>(&records[..last], *parties, group),
        "secp256k1" => verify_body::<Secp256k1Group>(&records[..last], *parties, group),
        other => fail(1, format!("unknown group profile {other}")),
    }
}

struct Walk<G: Group> {
    params: Option<RsaParams>,
    pks: Vec<G::Point>,
    messages: Vec<Vec<u8>>,
    session: Option<crate::protocol::SessionId>,
    adaptor: Option<G::Point>,
    keys_digest: Option<QrElement>,
    msgs_digest: Option<QrElement>,
    presig_digest: Option<QrElement>,
    presigs: Vec<Option<PreSignature<G>>>,
    verdict: Option<String>,
}

fn verify_body<G: Group>(
    records: &[Record],
    parties: u32,
    group: &str,
) -> Result<VerifySummary, TranscriptError> {
    if G::ID != group {
        return fail(1, "group profile does not match backend");
    }
    let mut w: Walk<G> = Walk {
        params: None,
        pks: Vec::new(),
        messages: Vec::new(),
        session: None,
        adaptor: None,
        keys_digest: None,
        msgs_digest: None,
        presig_digest: None,
        presigs: Vec::new(),
        verdict: None,
    };

    for (idx0, rec) in records.iter().enumerate() {
        let i = idx0 + 1;
        match rec {
            Record::Header { .. } => {
                if idx0 != 0 {
                    return fail(i, "header must be the first record");
                }
            }
            Record::AccParams { modulus, generator, prime_bits, mr_rounds } => {
                let n = BigUint::from_bytes_be(&unhex(i, "modulus", modulus)?);
                let g = BigUint::from_bytes_be(&unhex(i, "generator", generator)?);
                if n.bits() < 6 || !n.bit(0) {
                    return fail(i, "invalid accumulator modulus");
                }
                w.params = Some(RsaParams::new(n, g, *prime_bits, *mr_rounds));
            }
            Record::Terms { label, session, pks, amounts, expiries } => {
                if pks.len() != parties as usize {
                    return fail(i, "terms party count does not match header");
                }
                let label_bytes = unhex(i, "label", label)?;
                let label_arr: [u8; 32] = match label_bytes.try_into() {
                    Ok(a) => a,
                    Err(_) => return fail(i, "label must be 32 bytes"),
                };
                let mut decoded = Vec::new();
                for (k, pk) in pks.iter().enumerate() {
                    let b = unhex(i, "pks", pk)?;
                    match G::Point::from_bytes(&b) {
                        Ok(p) => decoded.push(p),
                        Err(e) => return fail(i, format!("public key {k} invalid: {e}")),
                    }
                }
                let terms = crate::protocol::SwapTerms::<G>::new(
                    label_arr,
                    decoded.clone(),
                    amounts.clone(),
                    expiries.clone(),
                )
                .map_err(|e| TranscriptError { record: i, message: format!("bad terms: {e}") })?;
                let sid = terms.session_id();
                if hex::encode(sid.0) != *session {
                    return fail(i, "session id does not match terms");
                }
                w.messages = (0..parties).map(|p| terms.message_bytes(PartyId(p))).collect();
                w.pks = decoded;
                w.session = Some(sid);
                w.presigs = vec![None; parties as usize];
            }
            Record::Adaptor { point, pok_a, pok_z } => {
                let p = decode_point::<G>(i, "point", point)?;
                let proof = DlogProof::<G> {
                    a: decode_point::<G>(i, "pok_a", pok_a)?,
                    z: decode_scalar::<G>(i, "pok_z", pok_z)?,
                };
                if !verify_dlog(&p, &proof) {
                    return fail(i, "adaptor proof of knowledge fails");
                }
                w.adaptor = Some(p);
            }
            Record::Digests { keys, msgs } => {
                let params = w.params.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "digests before acc-params".into(),
                })?;
                if w.pks.is_empty() {
                    return fail(i, "digests before terms");
                }
                let mut acc = Accumulator::new(params.clone());
                for pk in &w.pks {
                    acc.insert(&pk.to_bytes());
                }
                let kd = decode_qr(i, "keys", keys, params)?;
                if *acc.digest() != kd {
                    return fail(i, "key accumulator digest does not match public keys");
                }
                let mut acc = Accumulator::new(params.clone());
                for m in &w.messages {
                    acc.insert(m);
                }
                let md = decode_qr(i, "msgs", msgs, params)?;
                if *acc.digest() != md {
                    return fail(i, "message accumulator digest does not match terms");
                }
                w.keys_digest = Some(kd);
                w.msgs_digest = Some(md);
            }
            Record::PreSig { party, bytes } => {
                let b = unhex(i, "bytes", bytes)?;
                let presig = PreSignature::<G>::from_bytes(&b)
                    .map_err(|e| TranscriptError { record: i, message: format!("bad pre-signature: {e}") })?;
                let slot = *party as usize;
                if presig.party.0 != *party || slot >= w.pks.len() {
                    return fail(i, "pre-signature party out of range or mislabeled");
                }
                if w.presigs[slot].is_some() {
                    return fail(i, "duplicate pre-signature for party");
                }
                let adaptor = w.adaptor.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "pre-signature before adaptor announcement".into(),
                })?;
                if presig.adaptor_point != *adaptor {
                    return fail(i, "pre-signature does not commit to the announced adaptor point");
                }
                if !pre_verify(&presig, &w.pks[slot]) {
                    return fail(i, "pre-signature equation fails");
                }
                let expected = expected_challenge(&w, &presig, slot, i)?;
                if presig.challenge != expected {
                    return fail(i, "pre-signature challenge does not match transcript");
                }
                w.presigs[slot] = Some(presig);
            }
            Record::PresigAcc { digest } => {
                let params = w.params.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "presig-acc before acc-params".into(),
                })?;
                let mut acc = Accumulator::new(params.clone());
                for p in w.presigs.iter().flatten() {
                    acc.insert(&p.to_bytes());
                }
                let d = decode_qr(i, "digest", digest, params)?;
                if *acc.digest() != d {
                    return fail(i, "pre-signature accumulator digest does not match");
                }
                w.presig_digest = Some(d);
            }
            Record::ProtocolReject { .. } => {}
            Record::Finalize { sig } => {
                check_full_sig(&w, i, 0, sig)?;
            }
            Record::Complete { party, sig } => {
                check_full_sig(&w, i, *party, sig)?;
            }
            Record::TxAccepted { chain, payer, key_witness, presig_witness, sig, .. } => {
                let params = w.params.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "tx before acc-params".into(),
                })?;
                let slot = *payer as usize;
                if slot >= w.pks.len() || *chain != *payer {
                    return fail(i, "tx payer/chain out of range");
                }
                let kd = w.keys_digest.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "tx before digests".into(),
                })?;
                let pd = w.presig_digest.as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "tx before presig-acc".into(),
                })?;
                let kw = MembershipWitness { cofactor: decode_qr(i, "key_witness", key_witness, params)? };
                if !verify_membership(params, kd, &w.pks[slot].to_bytes(), &kw) {
                    return fail(i, "tx key membership witness fails");
                }
                let presig = w.presigs[slot].as_ref().ok_or_else(|| TranscriptError {
                    record: i,
                    message: "tx for a party with no recorded pre-signature".into(),
                })?;
                let pw = MembershipWitness {
                    cofactor: decode_qr(i, "presig_witness", presig_witness, params)?,
                };
                if !verify_membership(params, pd, &presig.to_bytes(), &pw) {
                    return fail(i, "tx pre-signature membership witness fails");
                }
                let full = check_full_sig(&w, i, *payer, sig)?;
                if extract_secret(&full, presig).is_none() {
                    return fail(i, "tx signature does not open the accumulated pre-signature");
                }
            }
            Record::TxRejected { reason, .. } => {
                if reason.is_empty() {
                    return fail(i, "tx rejection without a reason");
                }
            }
            Record::Probe { accepted, attempts, rejections, .. } => {
                if *accepted != 0 {
                    return fail(i, "probe reports accepted forgeries");
                }
                let total: u64 = rejections.iter().map(|(_, c)| *c).sum();
                if total != *attempts {
                    return fail(i, "probe rejection counts do not sum to attempts");
                }
            }
            Record::ChainLog { lines, .. } => {
                for (k, line) in lines.iter().enumerate() {
                    let mut it = line.splitn(3, ' ');
                    let h = it.next().and_then(|s| s.parse::<u64>().ok());
                    let kind = it.next();
                    let hash = it.next();
                    let ok = h.is_some()
                        && matches!(kind, Some("lock") | Some("spent") | Some("refund"))
                        && hash.map(|x| x.len() == 64 && hex::decode(x).is_ok()).unwrap_or(false);
                    if !ok {
                        return fail(i, format!("chain log line {k} malformed"));
                    }
                }
            }
            Record::Verdict { verdict, deltas, accepted } => {
                if deltas.len() != parties as usize {
                    return fail(i, "verdict delta count does not match parties");
                }
                if deltas.iter().sum::<i64>() != 0 {
                    return fail(i, "verdict deltas do not conserve value");
                }
                if accepted.iter().any(|c| *c > 1) {
                    return fail(i, "chain reports more than one accepted tx");
                }
                if !matches!(verdict.as_str(), "all-completed" | "none-completed" | "violation") {
                    return fail(i, format!("unknown verdict {verdict}"));
                }
                w.verdict = Some(verdict.clone());
            }
            Record::End { .. } => unreachable!("stripped by caller"),
        }
    }

    Ok(VerifySummary {
        records: records.len() + 1,
        group: group.to_string(),
        parties,
        verdict: w.verdict,
    })
}

fn expected_challenge<G: Group>(
    w: &Walk<G>,
    presig: &PreSignature<G>,
    slot: usize,
    i: usize,
) -> Result<G::Scalar, TranscriptError> {
    let params = w.params.as_ref().ok_or_else(|| TranscriptError {
        record: i,
        message: "pre-signature before acc-params".into(),
    })?;
    let combined = presig.nonce_point.add(&presig.adaptor_point);
    let msg = &w.messages[slot];
    if w.pks.len() == 2 {
        Ok(compute_challenge::<G>(ChallengeMode::Direct, &combined, &w.pks[slot], msg))
    } else {
        let kd = w.keys_digest.as_ref().ok_or_else(|| TranscriptError {
            record: i,
            message: "pre-signature before digests".into(),
        })?;
        let md = w.msgs_digest.as_ref().ok_or_else(|| TranscriptError {
            record: i,
            message: "pre-signature before digests".into(),
        })?;
        let kb = kd.to_bytes(params);
        let mb = md.to_bytes(params);
        Ok(compute_challenge::<G>(
            ChallengeMode::Accumulated { keys_digest: &kb, msgs_digest: &mb },
            &combined,
            &w.pks[slot],
            msg,
        ))
    }
}

fn check_full_sig<G: Group>(
    w: &Walk<G>,
    i: usize,
    party: u32,
    sig_hex: &str,
) -> Result<FullSignature<G>, TranscriptError> {
    let b = unhex(i, "sig", sig_hex)?;
    let sig = FullSignature::<G>::from_bytes(&b)
        .map_err(|e| TranscriptError { record: i, message: format!("bad signature: {e}") })?;
    let slot = party as usize;
    if sig.party.0 != party || slot >= w.pks.len() {
        return fail(i, "signature party out of range or mislabeled");
    }
    if !verify_full(&sig, &w.pks[slot]) {
        return fail(i, "completed signature fails verification");
    }
    let presig = w.presigs[slot].as_ref().ok_or_else(|| TranscriptError {
        record: i,
        message: "signature for a party with no recorded pre-signature".into(),
    })?;
    let t = extract_secret(&sig, presig).ok_or_else(|| TranscriptError {
        record: i,
        message: "signature does not open its pre-signature".into(),
    })?;
    if let Some(adaptor) = &w.adaptor {
        if G::Point::generator().mul(&t) != *adaptor {
            return fail(i, "extracted secret does not open the announced adaptor point");
        }
    }
    Ok(sig)
}

fn decode_point<G: Group>(i: usize, field: &str, s: &str) -> Result<G::Point, TranscriptError> {
    let b = unhex(i, field, s)?;
    G::Point::from_bytes(&b)
        .map_err(|e| TranscriptError { record: i, message: format!("field {field}: {e}") })
}

fn decode_scalar<G: Group>(i: usize, field: &str, s: &str) -> Result<G::Scalar, TranscriptError> {
    let b = unhex(i, field, s)?;
    G::Scalar::from_bytes(&b)
        .map_err(|e| TranscriptError { record: i, message: format!("field {field}: {e}") })
}

fn decode_qr(
    i: usize,
    field: &str,
    s: &str,
    params: &RsaParams,
) -> Result<QrElement, TranscriptError> {
    let b = unhex(i, field, s)?;
    QrElement::from_bytes(params, &b)
        .map_err(|e| TranscriptError { record: i, message: format!("field {field}: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_roundtrip() {
        let recs = vec![
            Record::Header {
                version: TRANSCRIPT_VERSION,
                group: "tiny".into(),
                parties: 2,
                seed: "00ff".into(),
                config_hash: "ab".into(),
            },
            Record::ProtocolReject { party: 1, error: "missing predecessor".into() },
        ];
        let text = render_transcript(&recs);
        let parsed = parse_transcript(&text).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[..2], recs[..]);
        assert!(matches!(parsed[2], Record::End { records: 2, .. }));
    }

    #[test]
    fn end_record_seals_bytes() {
        let recs = vec![Record::Header {
            version: TRANSCRIPT_VERSION,
            group: "tiny".into(),
            parties: 2,
            seed: "00".into(),
            config_hash: "00".into(),
        }];
        let text = render_transcript(&recs);
        // Structural verification path runs on full scenario transcripts in
        // the scenario tests; here check only the hash chain logic.
        let mut broken = text.clone();
        let pos = broken.find("tiny").unwrap();
        broken.replace_range(pos..pos + 4, "tinY");
        let err = verify_transcript(&broken).unwrap_err();
        assert!(err.message.contains("hash chain") || err.message.contains("unknown group"));
        assert!(err.record > 0);
    }

    #[test]
    fn truncation_is_detected() {
        let recs = vec![Record::Header {
            version: TRANSCRIPT_VERSION,
            group: "tiny".into(),
            parties: 2,
            seed: "00".into(),
            config_hash: "00".into(),
        }];
        let text = render_transcript(&recs);
        let first_line = text.lines().next().unwrap().to_string();
        let err = verify_transcript(&(first_line + "\n")).unwrap_err();
        assert!(err.message.contains("end record"));
        assert_eq!(verify_transcript("").unwrap_err().record, 0);
    }
}
