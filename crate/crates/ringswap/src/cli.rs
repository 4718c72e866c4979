//! Command-line front end: scenario runs, transcript verification, an
//! accumulator demo driver, and key generation.
//!
//! Exit codes are stable:
//!
//! | code | meaning                                                |
//! |------|--------------------------------------------------------|
//! | 0    | success; run verdict matched expectations              |
//! | 1    | verdict mismatch, atomicity violation, or a transcript/script check failed |
//! | 2    | configuration, flag, or input-format error             |
//! | 3    | file I/O error                                         |
//!
//! Custom accumulator profiles are looked up as `<name>.toml` inside the
//! directory named by the `RINGSWAP_PROFILE_DIR` environment variable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::acc::script::{parse_script, AccOp};
use crate::acc::{
    verify_batch_insert, verify_batch_remove, verify_multi_swap, Accumulator, Applied, RsaParams,
};
use crate::group::secp::Secp256k1Group;
use crate::group::tiny::TinyGroup;
use crate::group::{Group, PointElement, ScalarElement};
use crate::scenario::{run_scenario, Behavior, ScenarioOutcome, ScenarioSpec, Verdict};
use crate::schnorr::KeyPair;
use crate::transcript::{render_transcript, verify_transcript};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const PROFILE_DIR_ENV: &str = "RINGSWAP_PROFILE_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "ringswap",
    about = "Multi-party atomic swap scenarios over a deterministic chain simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run a swap scenario described by a TOML config file.
    Run {
        /// Path to the run configuration.
        config: PathBuf,
    },
    /// Re-verify a transcript offline, record by record.
    Verify {
        /// Path to a transcript produced by `run`.
        transcript: PathBuf,
    },
    /// Execute an accumulator operation script and print the digest trace.
    AccDemo {
        /// Path to the operation script.
        script: PathBuf,
        /// Accumulator profile: toy, realistic, or a custom profile name.
        #[arg(long, default_value = "toy")]
        profile: String,
        /// Hex seed for parameter generation.
        #[arg(long, default_value = "616363")]
        seed: String,
    },
    /// Derive a keypair deterministically from a seed.
    Keygen {
        /// Group profile: tiny or production.
        #[arg(long, default_value = "production")]
        group: String,
        /// Hex seed.
        #[arg(long)]
        seed: String,
    },
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

fn config_err(message: impl Into<String>) -> CliFailure {
    CliFailure { code: EXIT_CONFIG, message: message.into() }
}

fn check_err(message: impl Into<String>) -> CliFailure {
    CliFailure { code: EXIT_FAIL, message: message.into() }
}

fn read_file(path: &Path) -> Result<String, CliFailure> {
    std::fs::read_to_string(path).map_err(|e| CliFailure {
        code: EXIT_IO,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

/// Execute a parsed command line. Returns (exit code, stdout, stderr).
pub fn dispatch(cli: Cli) -> (i32, String, String) {
    let result = match &cli.cmd {
        Cmd::Run { config } => cmd_run(config),
        Cmd::Verify { transcript } => cmd_verify(transcript),
        Cmd::AccDemo { script, profile, seed } => cmd_acc_demo(script, profile, seed),
        Cmd::Keygen { group, seed } => cmd_keygen(group, seed),
    };
    match result {
        Ok(out) => (EXIT_OK, out, String::new()),
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}

#[derive(Deserialize, Debug)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RunConfigFile {
    group: String,
    accumulator: String,
    seed: String,
    parties: Option<u32>,
    behaviors: Option<Vec<String>>,
    amounts: Option<Vec<u64>>,
    expiry: Option<u64>,
    probe_trials: Option<u32>,
    /// Expected verdict; the run exits 1 when the outcome differs.
    expect: Option<String>,
    /// Where to write the transcript. Omitted: transcript goes to stdout.
    transcript: Option<PathBuf>,
    /// Separate seed for accumulator setup; defaults to `seed`.
    acc_seed: Option<String>,
}

#[derive(Deserialize, Debug)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ProfileFile {
    modulus_bits: u32,
    prime_bits: u32,
    mr_rounds: Option<u32>,
}

fn decode_seed(field: &str, s: &str) -> Result<Vec<u8>, CliFailure> {
    let bytes =
        hex::decode(s).map_err(|_| config_err(format!("{field} must be hex, got {s:?}")))?;
    if bytes.is_empty() {
        return Err(config_err(format!("{field} must be non-empty")));
    }
    Ok(bytes)
}

/// Resolve an accumulator profile name to parameters.
pub fn load_acc_params(profile: &str, seed: &[u8]) -> Result<RsaParams, CliFailure> {
    match profile {
        "toy" => Ok(RsaParams::toy(seed)),
        "realistic" => Ok(RsaParams::realistic(seed)),
        name => {
            let dir = std::env::var(PROFILE_DIR_ENV).map_err(|_| {
                config_err(format!(
                    "unknown accumulator profile {name:?}; set {PROFILE_DIR_ENV} to use custom profiles"
                ))
            })?;
            let path = Path::new(&dir).join(format!("{name}.toml"));
            let text = read_file(&path)?;
            let p: ProfileFile = toml::from_str(&text)
                .map_err(|e| config_err(format!("profile {}: {e}", path.display())))?;
            if p.modulus_bits < 16 || p.modulus_bits % 2 != 0 {
                return Err(config_err("profile modulus-bits must be even and at least 16"));
            }
            Ok(RsaParams::generate(seed, p.modulus_bits, p.prime_bits, p.mr_rounds.unwrap_or(20)))
        }
    }
}

pub fn cmd_run(config_path: &Path) -> Result<String, CliFailure> {
    let text = read_file(config_path)?;
    let cfg: RunConfigFile =
        toml::from_str(&text).map_err(|e| config_err(format!("config: {e}")))?;

    let behaviors: Vec<Behavior> = match &cfg.behaviors {
        Some(list) => list
            .iter()
            .map(|s| s.parse::<Behavior>())
            .collect::<Result<_, _>>()
            .map_err(|e| config_err(format!("behaviors: {e}")))?,
        None => {
            let n = cfg
                .parties
                .ok_or_else(|| config_err("config needs either parties or behaviors"))?;
            vec![Behavior::Honest; n as usize]
        }
    };
    if let Some(p) = cfg.parties {
        if p as usize != behaviors.len() {
            return Err(config_err(format!(
                "parties = {p} but {} behaviors listed",
                behaviors.len()
            )));
        }
    }
    let n = behaviors.len() as u32;
    let seed = decode_seed("seed", &cfg.seed)?;
    let amounts = cfg
        .amounts
        .clone()
        .unwrap_or_else(|| (0..n as u64).map(|i| 100 + i).collect());
    let spec = ScenarioSpec {
        seed: seed.clone(),
        behaviors,
        amounts,
        expiry: cfg.expiry.unwrap_or(10),
        probe_trials: cfg.probe_trials.unwrap_or(16),
    };
    spec.validate().map_err(config_err)?;
    let expect = cfg
        .expect
        .as_deref()
        .map(|s| s.parse::<Verdict>())
        .transpose()
        .map_err(|e| config_err(format!("expect: {e}")))?;

    let acc_seed = match &cfg.acc_seed {
        Some(s) => decode_seed("acc-seed", s)?,
        None => seed,
    };
    let params = load_acc_params(&cfg.accumulator, &acc_seed)?;

    let outcome = match cfg.group.as_str() {
        "tiny" => run_scenario::<TinyGroup>(&spec, &params),
        "production" => run_scenario::<Secp256k1Group>(&spec, &params),
        other => return Err(config_err(format!("unknown group profile {other:?}"))),
    };

    let transcript_text = render_transcript(&outcome.records);
    let mut out = String::new();
    match &cfg.transcript {
        Some(path) => {
            std::fs::write(path, transcript_text.as_bytes()).map_err(|e| CliFailure {
                code: EXIT_IO,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            out.push_str(&format!(
                "transcript: {} ({} records)\n",
                path.display(),
                outcome.records.len() + 1
            ));
        }
        None => out.push_str(&transcript_text),
    }
    out.push_str(&summarize(&outcome));

    if outcome.verdict == Verdict::Violation {
        return Err(check_err("atomicity violation: some parties paid without being paid"));
    }
    if let Some(expected) = expect {
        if expected != outcome.verdict {
            return Err(check_err(format!(
                "verdict {} but config expects {}",
                outcome.verdict, expected
            )));
        }
    }
    Ok(out)
}

fn summarize(outcome: &ScenarioOutcome) -> String {
    let mut s = format!("verdict: {}\n", outcome.verdict);
    s.push_str(&format!(
        "accepted: {}\n",
        outcome.accepted.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    ));
    s.push_str(&format!(
        "deltas: {}\n",
        outcome.deltas.iter().map(|d| format!("{d:+}")).collect::<Vec<_>>().join(" ")
    ));
    if outcome.rejections.is_empty() {
        s.push_str("rejections: none\n");
    } else {
        let parts: Vec<String> =
            outcome.rejections.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        s.push_str(&format!("rejections: {}\n", parts.join(" ")));
    }
    s
}

pub fn cmd_verify(transcript_path: &Path) -> Result<String, CliFailure> {
    let text = read_file(transcript_path)?;
    let summary = verify_transcript(&text).map_err(|e| check_err(e.to_string()))?;
    Ok(format!(
        "transcript ok: {} records, group {}, {} parties, verdict {}\n",
        summary.records,
        summary.group,
        summary.parties,
        summary.verdict.as_deref().unwrap_or("none"),
    ))
}

pub fn cmd_acc_demo(script_path: &Path, profile: &str, seed: &str) -> Result<String, CliFailure> {
    let seed = decode_seed("seed", seed)?;
    let text = read_file(script_path)?;
    let ops = parse_script(&text).map_err(|e| config_err(e.to_string()))?;
    let params = load_acc_params(profile, &seed)?;

    let mut acc = Accumulator::new(params.clone());
    let mut out = format!(
        "params: {}-bit modulus, {}-bit primes\ndigest: {}\n",
        params.modulus().bits(),
        params.prime_bits,
        hex::encode(acc.digest().to_bytes(&params)),
    );
    for (i, op) in ops.iter().enumerate() {
        let applied = acc
            .apply(op)
            .map_err(|e| check_err(format!("operation {} failed: {e}", i + 1)))?;
        let line = match (&applied, op) {
            (Applied::Plain { new_digest }, _) => {
                format!("digest {}", hex::encode(new_digest.to_bytes(&params)))
            }
            (Applied::Batched { update, removal }, op) => {
                let elems = match op {
                    AccOp::BatchInsert(e) | AccOp::BatchRemove(e) => e.clone(),
                    _ => unreachable!("batched result comes from batch ops"),
                };
                let outcome = if *removal {
                    verify_batch_remove(
                        &params,
                        &update.old_digest,
                        &update.new_digest,
                        &elems,
                        &update.proof,
                    )
                } else {
                    verify_batch_insert(
                        &params,
                        &update.old_digest,
                        &update.new_digest,
                        &elems,
                        &update.proof,
                    )
                };
                if !outcome.valid {
                    return Err(check_err(format!("operation {} proof invalid", i + 1)));
                }
                format!(
                    "digest {} [proof ok, exponent bits {}]",
                    hex::encode(update.new_digest.to_bytes(&params)),
                    outcome.exponent_bits
                )
            }
            (Applied::Swapped { update }, AccOp::MultiSwap { removals, insertions }) => {
                let outcome = verify_multi_swap(&params, update, removals, insertions);
                if !outcome.valid {
                    return Err(check_err(format!("operation {} proof invalid", i + 1)));
                }
                format!(
                    "digest {} [proofs ok, exponent bits {}]",
                    hex::encode(update.new_digest.to_bytes(&params)),
                    outcome.exponent_bits
                )
            }
            (Applied::Swapped { .. }, _) => unreachable!("swap result comes from multiswap"),
        };
        out.push_str(&format!("op {} -> {}\n", crate::acc::script::format_op(op), line));
    }
    out.push_str(&format!(
        "final: {} elements, digest {}\n",
        acc.len(),
        hex::encode(acc.digest().to_bytes(&params))
    ));
    Ok(out)
}

pub fn cmd_keygen(group: &str, seed: &str) -> Result<String, CliFailure> {
    let seed = decode_seed("seed", seed)?;
    fn emit<G: Group>(seed: &[u8]) -> String {
        let kp = KeyPair::<G>::generate(seed);
        format!(
            "group: {}\nsecret: {}\npublic: {}\n",
            G::ID,
            hex::encode(kp.secret().to_bytes()),
            hex::encode(kp.public().to_bytes()),
        )
    }
    match group {
        "tiny" => Ok(emit::<TinyGroup>(&seed)),
        "production" => Ok(emit::<Secp256k1Group>(&seed)),
        other => Err(config_err(format!("unknown group profile {other:?}"))),
    }
}

/// Rejection totals across a batch of probe stats, used by reports.
pub fn merge_rejections(maps: &[&BTreeMap<String, u64>]) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for m in maps {
        for (k, v) in m.iter() {
            *out.entry(k.clone()).or_insert(0) += v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    fn base_config(dir: &tempfile::TempDir, extra: &str) -> PathBuf {
        let transcript = dir.path().join("out.jsonl");
        let content = format!(
            "group = \"tiny\"\naccumulator = \"toy\"\nseed = \"aa01\"\nparties = 3\ntranscript = {:?}\n{extra}",
            transcript.to_str().unwrap()
        );
        write_tmp(dir, "run.toml", &content)
    }

    #[test]
    fn run_writes_verifiable_transcript() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(&dir, "expect = \"all-completed\"\n");
        let out = cmd_run(&cfg).unwrap();
        assert!(out.contains("verdict: all-completed"));
        assert!(out.contains("accepted: 1 1 1"));

        let transcript = dir.path().join("out.jsonl");
        let ok = cmd_verify(&transcript).unwrap();
        assert!(ok.contains("transcript ok"));
        assert!(ok.contains("verdict all-completed"));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(&dir, "");
        cmd_run(&cfg).unwrap();
        let first = std::fs::read(dir.path().join("out.jsonl")).unwrap();
        cmd_run(&cfg).unwrap();
        let second = std::fs::read(dir.path().join("out.jsonl")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn expectation_mismatch_exits_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(&dir, "expect = \"none-completed\"\n");
        let err = cmd_run(&cfg).unwrap_err();
        assert_eq!(err.code, EXIT_FAIL);
        assert!(err.message.contains("expects none-completed"));
    }

    #[test]
    fn config_errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write_tmp(&dir, "bad.toml", "group = \"tiny\"\nnot even toml");
        assert_eq!(cmd_run(&bad).unwrap_err().code, EXIT_CONFIG);

        let unknown = write_tmp(
            &dir,
            "unknown.toml",
            "group = \"m31\"\naccumulator = \"toy\"\nseed = \"aa\"\nparties = 2\n",
        );
        assert_eq!(cmd_run(&unknown).unwrap_err().code, EXIT_CONFIG);

        let odd = write_tmp(
            &dir,
            "odd.toml",
            "group = \"tiny\"\naccumulator = \"toy\"\nseed = \"zz\"\nparties = 2\n",
        );
        assert_eq!(cmd_run(&odd).unwrap_err().code, EXIT_CONFIG);

        let mismatch = write_tmp(
            &dir,
            "mismatch.toml",
            "group = \"tiny\"\naccumulator = \"toy\"\nseed = \"aa\"\nparties = 3\nbehaviors = [\"honest\", \"honest\"]\n",
        );
        assert_eq!(cmd_run(&mismatch).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn io_errors_exit_three() {
        let missing = Path::new("/nonexistent/definitely/missing.toml");
        assert_eq!(cmd_run(missing).unwrap_err().code, EXIT_IO);
        assert_eq!(cmd_verify(missing).unwrap_err().code, EXIT_IO);
    }

    #[test]
    fn tampered_transcript_fails_verify_with_index() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(&dir, "");
        cmd_run(&cfg).unwrap();
        let path = dir.path().join("out.jsonl");
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 3;
        bytes[mid] ^= 0x01;
        std::fs::write(&path, &bytes).unwrap();
        let err = cmd_verify(&path).unwrap_err();
        assert_eq!(err.code, EXIT_FAIL);
        assert!(err.message.contains("record"));
    }

    #[test]
    fn acc_demo_traces_digests() {
        let dir = tempfile::tempdir().unwrap();
        let script = write_tmp(
            &dir,
            "ops.txt",
            "# demo\ninsert apple\ninsert pear\nbatch-insert plum fig date\nmultiswap apple -> lime\nremove pear\n",
        );
        let out = cmd_acc_demo(&script, "toy", "616363").unwrap();
        assert!(out.contains("proof ok"));
        assert!(out.contains("proofs ok"));
        assert!(out.contains("final: 4 elements"));
        let again = cmd_acc_demo(&script, "toy", "616363").unwrap();
        assert_eq!(out, again);

        let empty = write_tmp(&dir, "empty.txt", "# nothing\n");
        let out = cmd_acc_demo(&empty, "toy", "616363").unwrap();
        assert!(out.contains("final: 0 elements"));

        let bad = write_tmp(&dir, "bad.txt", "conjure gold\n");
        assert_eq!(cmd_acc_demo(&bad, "toy", "616363").unwrap_err().code, EXIT_CONFIG);

        let absent = write_tmp(&dir, "absent.txt", "remove ghost\n");
        assert_eq!(cmd_acc_demo(&absent, "toy", "616363").unwrap_err().code, EXIT_FAIL);
    }

    #[test]
    fn custom_profile_from_env_dir() {
        let dir = tempfile::tempdir().unwrap();
        write_tmp(&dir, "mini.toml", "modulus-bits = 64\nprime-bits = 24\nmr-rounds = 12\n");
        std::env::set_var(PROFILE_DIR_ENV, dir.path());
        let params = load_acc_params("mini", b"custom").unwrap();
        assert_eq!(params.prime_bits, 24);
        assert_eq!(params.mr_rounds, 12);
        assert!(params.modulus().bits() <= 64);
        let err = load_acc_params("nothere", b"custom").unwrap_err();
        assert_eq!(err.code, EXIT_IO);
        std::env::remove_var(PROFILE_DIR_ENV);
    }

    #[test]
    fn keygen_is_deterministic_per_group() {
        let a = cmd_keygen("tiny", "00ff").unwrap();
        let b = cmd_keygen("tiny", "00ff").unwrap();
        assert_eq!(a, b);
        assert!(a.contains("group: tiny"));
        let c = cmd_keygen("production", "00ff").unwrap();
        assert!(c.contains("group: secp256k1"));
        assert_ne!(a, c);
        assert_eq!(cmd_keygen("p521", "00ff").unwrap_err().code, EXIT_CONFIG);
        assert_eq!(cmd_keygen("tiny", "xx").unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn transcript_to_stdout_when_no_path_given() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_tmp(
            &dir,
            "stdout.toml",
            "group = \"tiny\"\naccumulator = \"toy\"\nseed = \"aa02\"\nparties = 2\n",
        );
        let out = cmd_run(&cfg).unwrap();
        assert!(out.contains("\"kind\":\"header\""));
        assert!(out.contains("verdict: all-completed"));
    }
}
