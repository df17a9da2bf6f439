use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::reader::{load_manifest, verify_digests};
use super::{
    expected_class_counts, read, regenerate_clean, replay_meta, to_stored, DatasetManifest, ExampleMeta, SAMPLE_BYTES,
};
use crate::classes::{Family, CLASSES, NUM_CLASSES};
use crate::error::Result;
use crate::impairments::{replay_traced, ImpairmentStep};
use crate::measure::{envelope_constancy, measure_esn0};

/// Examples regenerated beyond the first of each class.
const REPLAY_SAMPLES: u64 = 64;
const ENVELOPE_LIMIT: usize = 256;
/// Envelope tolerance after `f32` storage.
const ENVELOPE_TOLERANCE: f64 = 1e-6;
pub const SNR_TOLERANCE_DB: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, failures: Vec<String>, ok_detail: String) {
        let passed = failures.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            let shown: Vec<_> = failures.iter().take(5).cloned().collect();
            let more = failures.len().saturating_sub(5);
            let suffix = if more > 0 {
                format!(" (+{more} more)")
            } else {
                String::new()
            };
            format!("{}{suffix}", shown.join("; "))
        };
        self.checks.push(CheckResult { name, passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<16} {}  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            )?;
        }
        Ok(())
    }
}

fn replay_sample(total: u64) -> BTreeSet<u64> {
    let mut set: BTreeSet<u64> = (0..total.min(NUM_CLASSES as u64)).collect();
    let stride = total.div_ceil(REPLAY_SAMPLES).max(1);
    set.extend((0..total).step_by(stride as usize));
    set
}

fn structure_failures(dir: &Path, manifest: &DatasetManifest) -> Vec<String> {
    let mut failures = Vec::new();
    let mut next = 0;
    let frame_bytes = (manifest.config.frame_len * SAMPLE_BYTES) as u64;
    for s in &manifest.shards {
        if s.start != next {
            failures.push(format!("shard {} starts at {} instead of {next}", s.index, s.start));
        }
        next = s.start + s.count;
        match std::fs::metadata(dir.join(&s.iq_file)) {
            Ok(m) if m.len() == s.count * frame_bytes => {}
            Ok(m) => failures.push(format!(
                "{} holds {} bytes, expected {}",
                s.iq_file,
                m.len(),
                s.count * frame_bytes
            )),
            Err(e) => failures.push(format!("{}: {e}", s.iq_file)),
        }
    }
    if next != manifest.total_examples {
        failures.push(format!(
            "shards cover {next} examples, manifest says {}",
            manifest.total_examples
        ));
    }
    failures
}

fn noise_step(meta: &ExampleMeta) -> Option<f64> {
    meta.impairments.steps.iter().find_map(|s| match s {
        ImpairmentStep::Awgn { samples_per_symbol, .. } => Some(*samples_per_symbol),
        _ => None,
    })
}

/// Runs the dataset invariant suite: digests, structure, class balance
/// and table conformance, bit-exact replay, Es/N0 calibration and FSK
/// envelope constancy.
pub fn validate(dir: &Path) -> Result<ValidationReport> {
    let manifest = load_manifest(dir)?;
    let config = &manifest.config;
    let mut report = ValidationReport { checks: Vec::new() };

    let digest = verify_digests(dir, &manifest)
        .err()
        .map(|e| e.to_string())
        .into_iter()
        .collect();
    report.push(
        "digest",
        digest,
        format!("{} shards, {}", manifest.shards.len(), manifest.digest),
    );
    report.push(
        "structure",
        structure_failures(dir, &manifest),
        format!("{} examples", manifest.total_examples),
    );

    let sample = replay_sample(manifest.total_examples);
    let mut counts = vec![0u64; NUM_CLASSES];
    let mut table = Vec::new();
    let mut replay_fail = Vec::new();
    let mut snr_fail = Vec::new();
    let mut envelope_fail = Vec::new();
    let mut read_fail = Vec::new();
    let mut envelope_checked = 0;
    let mut snr_checked = 0;
    let mut replayed = 0;
    let mut worst_snr: f64 = 0.0;

    for item in read(dir, false)? {
        let (frame, meta) = match item {
            Ok(v) => v,
            Err(e) => {
                read_fail.push(e.to_string());
                break;
            }
        };
        let i = meta.index;
        match CLASSES.get(meta.class_index) {
            Some(c) if c.name == meta.class_name && c.family == meta.family && meta.class_index as u64 == i % 53 => {
                counts[meta.class_index] += 1;
            }
            _ => table.push(format!(
                "example {i}: ({}, {}, {})",
                meta.class_index, meta.class_name, meta.family
            )),
        }

        if !config.variant.is_impaired() && meta.family == Family::Fsk && envelope_checked < ENVELOPE_LIMIT {
            envelope_checked += 1;
            match envelope_constancy(&frame) {
                Ok(e) if e <= ENVELOPE_TOLERANCE => {}
                Ok(e) => envelope_fail.push(format!("example {i}: {e:.3e}")),
                Err(e) => envelope_fail.push(format!("example {i}: {e}")),
            }
        }

        if !sample.contains(&i) {
            continue;
        }
        replayed += 1;
        match replay_meta(&meta, config) {
            Ok(regen) if to_stored(&regen) == to_stored(&frame) => {}
            Ok(_) => replay_fail.push(format!("example {i} differs from its replay")),
            Err(e) => replay_fail.push(format!("example {i}: {e}")),
        }

        if config.variant.is_impaired() {
            snr_checked += 1;
            let check = || -> Result<Option<f64>> {
                let (Some(target), Some(sps)) = (meta.snr_db, noise_step(&meta)) else {
                    return Ok(None);
                };
                let (clean, _) = regenerate_clean(&meta, config)?;
                let trace = replay_traced(&meta.impairments, &clean)?;
                Ok(Some(
                    measure_esn0(trace.pre_noise.samples(), &trace.noise, sps)? - target,
                ))
            };
            match check() {
                Ok(Some(err)) if err.abs() <= SNR_TOLERANCE_DB => worst_snr = worst_snr.max(err.abs()),
                Ok(Some(err)) => snr_fail.push(format!("example {i}: off by {err:.3} dB")),
                Ok(None) => snr_fail.push(format!("example {i}: no noise record")),
                Err(e) => snr_fail.push(format!("example {i}: {e}")),
            }
            if let Some(snr) = meta.snr_db {
                if let Some((lo, hi)) = config.impairments.as_ref().and_then(|p| p.esn0_db) {
                    if !(lo..=hi).contains(&snr) {
                        snr_fail.push(format!("example {i}: target {snr} outside [{lo}, {hi}]"));
                    }
                }
            }
        }
    }

    report.push("read", read_fail, "all examples readable".into());
    report.push("class_table", table, "class triples match the class list".into());
    let mut balance = Vec::new();
    let expected = expected_class_counts(manifest.total_examples);
    if manifest.class_counts != expected {
        balance.push("manifest class counts differ from round-robin assignment".to_string());
    }
    if counts != expected {
        balance.push("stored class counts differ from round-robin assignment".to_string());
    }
    let per_class = config
        .examples_per_class()
        .map(|n| format!("{n} per class"))
        .unwrap_or_else(|| "round-robin counts".into());
    report.push("class_balance", balance, per_class);
    report.push(
        "replay",
        replay_fail,
        format!("{replayed} examples regenerate bit-exactly"),
    );
    if config.variant.is_impaired() {
        report.push(
            "snr_calibration",
            snr_fail,
            format!("{snr_checked} examples within {worst_snr:.2e} dB of target"),
        );
    } else {
        report.push(
            "envelope",
            envelope_fail,
            format!("{envelope_checked} FSK examples constant-envelope"),
        );
    }
    Ok(report)
}
