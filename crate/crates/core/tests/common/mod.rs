#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

/// Outcome sequence of the seven-responder trial that stops on enrollment 15.
pub const MOTIVATING_PATH: [u8; 15] = [0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1];

pub fn motivating_outcomes() -> Vec<bool> {
    MOTIVATING_PATH.iter().map(|&o| o == 1).collect()
}

/// `(golden file, arguments)` for every subcommand that prints a table.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("pmf_p0.2_s7_t11.csv", &["pmf", "--p", "0.2", "--s", "7", "--t", "11"]),
    ("pmf_p0.2_s7_t11.json", &["pmf", "--p", "0.2", "--s", "7", "--t", "11", "--format", "json"]),
    ("pmf_p1_s3_t9.csv", &["pmf", "--p", "1", "--s", "3", "--t", "9"]),
    ("moments_s7_t11.csv", &["moments", "--s", "7", "--t", "11", "--p-grid", "0:1:0.05"]),
    ("design_p0.2_a0.1_n17.csv", &["design", "--p0", "0.2", "--alpha-level", "0.1", "--max-n", "17"]),
    (
        "posterior_jeffreys_k15_success.csv",
        &["posterior", "--alpha", "0.5", "--beta", "0.5", "--s", "7", "--t", "11", "--k", "15", "--endpoint", "success"],
    ),
    (
        "posterior_jeffreys_k15_mixture.csv",
        &["posterior", "--alpha", "0.5", "--beta", "0.5", "--s", "7", "--t", "11", "--k", "15"],
    ),
    ("predictive_jeffreys_s7_t11.csv", &["predictive", "--alpha", "0.5", "--beta", "0.5", "--s", "7", "--t", "11"]),
    ("simulate_p0.2_s7_t11_n25_seed42.csv", &["simulate", "--p", "0.2", "--s", "7", "--t", "11", "--n", "25", "--seed", "42"]),
    ("oracle_check_p0.5_s2_t2.csv", &["oracle-check", "--p", "0.5", "--s", "2", "--t", "2"]),
    ("oracle_check_p0.2_s7_t11.csv", &["oracle-check", "--p", "0.2", "--s", "7", "--t", "11"]),
];

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("golden").join(name)
}

pub fn fixture_path(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("fixtures").join(name)
}

/// Set `SNB_BLESS=1` to rewrite golden files and fixtures from the current build.
pub fn blessing() -> bool {
    std::env::var_os("SNB_BLESS").is_some_and(|v| v == "1")
}

pub fn snb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snb"))
        .args(args)
        .env_remove("SNB_PORT")
        .output()
        .expect("spawn snb")
}

/// Compares one golden case against the binary's stdout; returns a
/// description of the first mismatch.
pub fn check_golden(name: &str, args: &[&str]) -> Result<(), String> {
    let out = snb(args);
    if !out.status.success() {
        return Err(format!("{name}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let path = golden_path(name);
    if blessing() {
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != out.stdout {
        return Err(format!("{name}: output differs from {}", path.display()));
    }
    Ok(())
}
