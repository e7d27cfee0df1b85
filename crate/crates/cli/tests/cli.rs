use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plotkin_mceliece::rng::{sample_fixed_weight, RandomStream};
use plotkin_mceliece::wire;
use serde_json::Value;
use tempfile::TempDir;

const SEED_A: &str = "0101010101010101010101010101010101010101010101010101010101010101";
const SEED_B: &str = "a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5";

fn pquv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pquv")).args(args).output().unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn toy_keys(dir: &TempDir, tag: &str) -> (PathBuf, PathBuf) {
    let (pk, sk) = (path(dir, &format!("{tag}.pub")), path(dir, &format!("{tag}.sec")));
    let out = pquv(&["keygen", "--preset", "toy", "--seed", SEED_A, "--pub", s(&pk), "--sec", s(&sk)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (pk, sk)
}

#[test]
fn keygen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (pk1, sk1) = toy_keys(&dir, "a");
    let (pk2, sk2) = toy_keys(&dir, "b");
    assert_eq!(std::fs::read(pk1).unwrap(), std::fs::read(pk2).unwrap());
    assert_eq!(std::fs::read(sk1).unwrap(), std::fs::read(sk2).unwrap());
}

#[test]
fn full_size_keygen_reports_the_key_size() {
    let dir = TempDir::new().unwrap();
    let (pk, sk) = (path(&dir, "k.pub"), path(&dir, "k.sec"));
    let out = pquv(&["keygen", "--preset", "cca128", "--seed", SEED_A, "--pub", s(&pk), "--sec", s(&sk)]);
    let json = stdout_json(&out);
    assert_eq!(json["publicKeyBits"], 47116);
}

#[test]
fn even_r_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (pk, sk) = (path(&dir, "k.pub"), path(&dir, "k.sec"));
    let out = pquv(&["keygen", "--params", "2,524,30,8,12,4", "--seed", SEED_A, "--pub", s(&pk), "--sec", s(&sk)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
    assert!(!pk.exists() && !sk.exists());
}

#[test]
fn toy_roundtrip_and_tampering() {
    let dir = TempDir::new().unwrap();
    let (pk, sk) = toy_keys(&dir, "k");
    let msg = path(&dir, "m.bin");
    let mut bytes: Vec<u8> = (0..131u8).map(|i| i.wrapping_mul(37)).collect();
    bytes[130] &= 0x3f; // 1046 bits
    std::fs::write(&msg, &bytes).unwrap();
    let (ct, back) = (path(&dir, "m.ct"), path(&dir, "m.out"));
    let out = pquv(&["encrypt", "--pub", s(&pk), "--in", s(&msg), "--out", s(&ct), "--seed", SEED_B]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = pquv(&["decrypt", "--sec", s(&sk), "--in", s(&ct), "--out", s(&back)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&back).unwrap(), bytes);

    let short = path(&dir, "short.bin");
    std::fs::write(&short, &bytes[..130]).unwrap();
    let out = pquv(&["encrypt", "--pub", s(&pk), "--in", s(&short), "--out", s(&path(&dir, "x.ct")), "--seed", SEED_B]);
    assert_eq!(out.status.code(), Some(2));

    let (p, mut c) = wire::deserialize_ct(&std::fs::read(&ct).unwrap()).unwrap();
    let noise = sample_fixed_weight(&mut RandomStream::from_seed(&[1; 32]), p.n(), p.n() / 4).unwrap();
    c.c1.xor_assign(&noise).unwrap();
    let bad = path(&dir, "bad.ct");
    std::fs::write(&bad, wire::serialize_ct(&p, &c)).unwrap();
    let lost = path(&dir, "lost.out");
    let out = pquv(&["decrypt", "--sec", s(&sk), "--in", s(&bad), "--out", s(&lost)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage=MDPC"));
    assert!(!lost.exists());
}

#[test]
fn dfr_without_errors_never_fails() {
    let json = stdout_json(&pquv(&["dfr", "--params", "2,523,8", "--t", "0", "--trials", "100", "--seed", SEED_A]));
    assert_eq!(json["failures"], 0);
    assert_eq!(json["trials"], 100);
}

#[test]
fn estimate_cca128() {
    let json = stdout_json(&pquv(&["estimate", "--preset", "cca128"]));
    let wf = json["messageRecovery"]["log2WorkFactor"].as_f64().unwrap();
    assert!((125.9..=131.9).contains(&wf), "{wf}");
}

#[test]
fn attack_demo_recovers_the_dual_but_not_plaintexts() {
    let json = stdout_json(&pquv(&["attack-demo", "--r", "101", "--w2", "6", "--trials", "20", "--seed", SEED_A, "--workers", "4"]));
    assert_eq!(json["recoveredRowWeight"], 6);
    assert_eq!(json["dualOrthogonal"], true);
    assert_eq!(json["attackSucceeded"], false);
    assert_eq!(json["reports"].as_array().unwrap().len(), 20);
}
