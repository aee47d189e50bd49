//! Shared helpers for the integration and acceptance suites.

#![allow(dead_code)]

use std::path::Path;
use std::process::Output;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHABET: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

/// Runs the CLI binary with the given arguments.
pub fn protsrc(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_protsrc"))
        .args(args)
        .output()
        .expect("CLI binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        stdout_of(output),
        stderr_of(output)
    );
}

/// Synthetic sequences whose residue usage clusters by class: class 1
/// draws mostly from the first ten letters of the alphabet, class 2 from
/// the last ten, with per-sequence weight jitter providing class-private
/// composition variation.
pub fn synthetic_sequences(class_one: bool, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequences = Vec::with_capacity(count);
    for _ in 0..count {
        let weights: Vec<f64> = (0..20)
            .map(|i| {
                let own = (i < 10) == class_one;
                if own {
                    rng.random_range(0.5..1.5)
                } else {
                    rng.random_range(0.0..0.08)
                }
            })
            .collect();
        let dist = WeightedIndex::new(&weights).unwrap();
        let len = rng.random_range(120..=240);
        let seq: String = (0..len)
            .map(|_| ALPHABET[dist.sample(&mut rng)] as char)
            .collect();
        sequences.push(seq);
    }
    sequences
}

/// Renders sequences as FASTA with ids `<prefix>0`, `<prefix>1`, ...
pub fn to_fasta(prefix: &str, sequences: &[String]) -> String {
    let mut out = String::new();
    for (i, seq) in sequences.iter().enumerate() {
        out.push_str(&format!(">{prefix}{i}\n{seq}\n"));
    }
    out
}

/// Writes a synthetic FASTA file and returns its path as a String.
pub fn write_fasta_file(dir: &Path, name: &str, prefix: &str, sequences: &[String]) -> String {
    let path = dir.join(name);
    std::fs::write(&path, to_fasta(prefix, sequences)).unwrap();
    path.to_string_lossy().into_owned()
}

/// Splits a predict CSV into (header, data rows).
pub fn parse_csv(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap_or("").to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}
