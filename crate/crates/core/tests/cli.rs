use std::path::{Path, PathBuf};
use std::process::Command;

use zkagree::cli::invoke;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn zk(dir: &Path, args: &[&str]) -> zkagree::cli::Invocation {
    let out = dir.join("out");
    let mut full = vec!["zkagree", "--out-dir", out.to_str().unwrap()];
    full.extend_from_slice(args);
    invoke(full)
}

#[test]
fn keygen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(zk(dir.path(), &["keygen", a.to_str().unwrap(), "--seed", "7"]).code, 0);
    assert_eq!(zk(dir.path(), &["keygen", b.to_str().unwrap(), "--seed", "7"]).code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let kf: zkagree::cli::KeyFile = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    let kp = zkagree::crypto::KeyPair::from_secret(zkagree::crypto::SecretKey::from_hex(&kf.sk_hex).unwrap());
    assert_eq!(kp.pk.to_hex(), kf.pk_hex);
}

#[test]
fn keygen_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("key.json");
    let r = zk(dir.path(), &["keygen", target.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("key.json"));
}

#[test]
fn compile_rental() {
    let dir = tempfile::tempdir().unwrap();
    let t = manifest().join("fixtures/rental.toml");
    let r = zk(dir.path(), &["compile", t.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("value_v   2000000000000000000"));
    let written = dir.path().join("out/RentalSecurityDeposit.contract.json");
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(written).unwrap()).unwrap();
    assert_eq!(doc["value_v"], "2000000000000000000");

    let d = zk(dir.path(), &["compile", t.to_str().unwrap(), "--seed", "1", "--digest-only"]);
    assert_eq!(d.code, 0);
    let line = d.stdout.trim();
    assert!(line.starts_with("0x") && line.len() == 66, "{line}");
    assert!(r.stdout.contains(line));
}

#[test]
fn compile_with_explicit_keys() {
    let dir = tempfile::tempdir().unwrap();
    let key = dir.path().join("arb.json");
    assert_eq!(zk(dir.path(), &["keygen", key.to_str().unwrap(), "--seed", "3"]).code, 0);
    let t = manifest().join("fixtures/rental.toml");
    let pk = zkagree::crypto::keygen_from_seed(9).pk.to_hex();
    let arb = format!("arbitrator={}", key.display());
    let ten = format!("tenant={pk}");
    let r = zk(dir.path(), &["compile", t.to_str().unwrap(), "--key", &arb, "--key", &ten, "--seed", "1", "--digest-only"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let bad = zk(dir.path(), &["compile", t.to_str().unwrap(), "--key", "tenant", "--digest-only"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn compile_reports_located_errors() {
    let dir = tempfile::tempdir().unwrap();
    let src = zkagree::fixtures::PAYMENT_UPON_DELIVERY_TEMPLATE.replace("then approve", "then approve approve");
    let t = dir.path().join("broken.toml");
    std::fs::write(&t, src).unwrap();
    let r = zk(dir.path(), &["compile", t.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("broken.toml"), "{}", r.stderr);
    assert!(r.stderr.contains("at 4"), "{}", r.stderr);
}

#[test]
fn run_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["rental_approve", "rental_dispute", "rental_forged_arbitration", "payment_refused"] {
        let s = manifest().join(format!("fixtures/scenarios/{name}.json"));
        let r = zk(dir.path(), &["run", s.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
    }
    let report: zkagree::orchestrator::SessionReport =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/rental-forged-arbitration.report.json")).unwrap()).unwrap();
    assert_eq!(report.lifecycle.lifecycle, zkagree::clc::Lifecycle::Evaluation);
}

#[test]
fn run_expectation_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(manifest().join("fixtures/scenarios/rental_approve.json")).unwrap()).unwrap();
    json["expect"]["balances"]["tenant"] = "1 ETH".into();
    let s = dir.path().join("s.json");
    std::fs::write(&s, json.to_string()).unwrap();
    let r = zk(dir.path(), &["run", s.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("step `expectation`"), "{}", r.stderr);
    assert!(r.stdout.contains("COMPLETED"));
}

#[test]
fn run_persists_ledger_and_inspect_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.json");
    let srs = dir.path().join("srs.json");
    let s = manifest().join("fixtures/scenarios/rental_dispute.json");
    let args = ["--ledger", ledger.to_str().unwrap(), "--srs", srs.to_str().unwrap(), "run", s.to_str().unwrap()];
    assert_eq!(zk(dir.path(), &args).code, 0);
    assert!(srs.exists());
    // same seed, same nullifier: the ledger refuses the second settlement
    let replay = zk(dir.path(), &args);
    assert_eq!(replay.code, 1);
    assert!(replay.stderr.contains("nullifier already spent"), "{}", replay.stderr);
    let mut fresh = args.to_vec();
    fresh.extend(["--seed", "31"]);
    let again = zk(dir.path(), &fresh);
    // balances accumulate on the shared ledger, so expectations no longer hold
    assert_eq!(again.code, 1);
    assert!(again.stderr.contains("step `expectation`"), "{}", again.stderr);
    let i = zk(dir.path(), &["inspect", ledger.to_str().unwrap()]);
    assert_eq!(i.code, 0, "{}", i.stderr);
    assert!(i.stdout.contains("leaves 2"));
    assert_eq!(i.stdout.matches("SETTLE").count(), 2);

    let report = dir.path().join("out/rental-dispute.report.json");
    let i = zk(dir.path(), &["inspect", report.to_str().unwrap()]);
    assert!(i.stdout.contains("RATIO(1500000000000000000)"));
    assert!(i.stdout.contains("[attestation]"));

    let snap = zkagree::ledger::Ledger::from_json(&std::fs::read_to_string(&ledger).unwrap()).unwrap();
    let log = dir.path().join("tx.jsonl");
    std::fs::write(&log, snap.tx_log_ldjson()).unwrap();
    let i = zk(dir.path(), &["inspect", log.to_str().unwrap()]);
    assert_eq!(i.code, 0, "{}", i.stderr);
    assert_eq!(i.stdout.lines().count(), snap.tx_log().len());
}

#[test]
fn bench_counts() {
    let dir = tempfile::tempdir().unwrap();
    let r = zk(dir.path(), &["bench", "--iterations", "3", "--json"]);
    assert_eq!(r.code, 0);
    let report: zkagree::bench::BenchReport = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report.relations[0].hash_invocations, 2);
    assert_eq!(report.relations[1].hash_invocations, 22);
    assert!(report.relations.iter().all(|x| x.prove_median_us > 0.0 && x.verify_median_us > 0.0));
    assert!(report.note.contains("not comparable"));
    let table = zk(dir.path(), &["bench", "--iterations", "1"]);
    assert!(table.stdout.contains("not comparable"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zk(dir.path(), &["frobnicate"]).code, 2);
    assert_eq!(zk(dir.path(), &["run"]).code, 2);
    assert_eq!(zk(dir.path(), &["bench", "--iterations", "x"]).code, 2);
    let help = zk(dir.path(), &["--help"]);
    assert_eq!(help.code, 0);
    for cmd in ["keygen", "compile", "run", "bench", "inspect"] {
        assert!(help.stdout.contains(cmd));
    }
}

#[test]
fn binary_honours_seed_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_zkagree");
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(["keygen", path.to_str().unwrap()])
            .env("ZKAGREE_SEED", "99")
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("x.json"), run("y.json"));
    let expected = zkagree::crypto::keygen_from_seed(99).pk.to_hex();
    assert!(String::from_utf8(run("z.json")).unwrap().contains(&expected));

    let bad = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
