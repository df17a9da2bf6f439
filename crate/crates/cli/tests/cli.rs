use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use sigforge::dataset::{read_example, MANIFEST_FILE};
use sigforge::server::{BatchRequest, Client};

fn sigforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigforge"))
        .args(args)
        .output()
        .unwrap()
}

fn generate(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "generate",
        "--variant",
        "impaired-val",
        "--count",
        "106",
        "--seed",
        "7",
        "--frame-len",
        "1024",
    ];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    sigforge(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_prints_a_stable_digest() {
    let root = tempfile::tempdir().unwrap();
    let a = generate(&root.path().join("a"), &[]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = generate(&root.path().join("b"), &["--workers", "3"]);
    let digest = stdout(&a).trim().to_string();
    assert_eq!(digest.len(), 64);
    assert_eq!(digest, stdout(&b).trim());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.path().join("a").join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["total_examples"], 106);
    assert!(manifest["class_counts"].as_array().unwrap().iter().all(|c| c == 2));
    assert_eq!(manifest["digest"], digest.as_str());
}

#[test]
fn workers_from_environment() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_sigforge"))
        .args([
            "generate",
            "--variant",
            "clean-val",
            "--count",
            "53",
            "--frame-len",
            "512",
            "--out",
        ])
        .arg(&out)
        .env("SIGFORGE_WORKERS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_sigforge"))
        .args(["generate", "--variant", "clean-val", "--count", "53", "--out"])
        .arg(root.path().join("bad"))
        .env("SIGFORGE_WORKERS", "many")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn bad_variant_is_a_usage_error() {
    let root = tempfile::tempdir().unwrap();
    let o = sigforge(&[
        "generate",
        "--variant",
        "noisy",
        "--count",
        "1",
        "--out",
        root.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("noisy") && err.contains("--help"), "{err}");
}

#[test]
fn existing_dataset_needs_force() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("d");
    assert!(generate(&out, &[]).status.success());
    assert!(!generate(&out, &[]).status.success());
    assert!(generate(&out, &["--force"]).status.success());
}

#[test]
fn inspect_exports() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("d");
    assert!(generate(&out, &[]).status.success());
    let dir = out.to_str().unwrap();
    let psd = root.path().join("psd.csv");
    let pgm = root.path().join("spec.pgm");
    let iq = root.path().join("iq.csv");
    let o = sigforge(&[
        "inspect",
        "--in",
        dir,
        "--index",
        "8",
        "--meta",
        "--psd",
        psd.to_str().unwrap(),
        "--spec",
        pgm.to_str().unwrap(),
        "--constellation",
        iq.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (_, meta) = read_example(&out, 8).unwrap();
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("8 16QAM QAM "), "{first}");
    assert!(first.contains(&format!("{:.2} dB", meta.snr_db.unwrap())));
    let json_start = text.find('{').unwrap();
    let printed: sigforge::dataset::ExampleMeta = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(printed, meta);

    assert_eq!(fs::read_to_string(&psd).unwrap().lines().count(), 256);
    let image = fs::read(&pgm).unwrap();
    assert!(image.starts_with(b"P5\n7 256\n255\n"));
    assert_eq!(image.len(), "P5\n7 256\n255\n".len() + 7 * 256);
    assert_eq!(fs::read_to_string(&iq).unwrap().lines().count(), 512);

    let fsk = sigforge(&[
        "inspect",
        "--in",
        dir,
        "--index",
        "25",
        "--constellation",
        iq.to_str().unwrap(),
    ]);
    assert!(!fsk.status.success());
    let missing = sigforge(&["inspect", "--in", dir, "--index", "106"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("106"));
}

#[test]
fn validate_reports_per_check() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("d");
    assert!(generate(&out, &[]).status.success());
    let dir = out.to_str().unwrap();
    let ok = sigforge(&["validate", dir]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    for check in ["digest", "class_balance", "replay", "snr_calibration"] {
        assert!(
            stdout(&ok).lines().any(|l| l.starts_with(check) && l.contains("PASS")),
            "{check}"
        );
    }

    let meta_path = out.join("shard-00000.meta.jsonl");
    let original = fs::read_to_string(&meta_path).unwrap();
    // Change one recorded phase value; the JSON stays valid.
    let start = original.find("\"phi\":").expect("a phase shift is recorded") + 6;
    let end = start + original[start..].find([',', '}']).unwrap();
    let fuzzed = format!("{}0.123{}", &original[..start], &original[end..]);
    fs::write(&meta_path, fuzzed).unwrap();
    let bad = sigforge(&["validate", dir]);
    assert!(!bad.status.success());
    assert!(
        stdout(&bad)
            .lines()
            .any(|l| l.starts_with("replay") && l.contains("FAIL")),
        "{}",
        stdout(&bad)
    );
    fs::write(&meta_path, original).unwrap();

    let iq_path = out.join("shard-00000.iq");
    let bytes = fs::read(&iq_path).unwrap();
    fs::write(&iq_path, &bytes[..bytes.len() - 1]).unwrap();
    let truncated = sigforge(&["validate", dir]);
    assert!(!truncated.status.success());
    assert!(stdout(&truncated)
        .lines()
        .any(|l| l.starts_with("digest") && l.contains("FAIL")));
}

#[test]
fn serve_answers_batches() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sigforge"))
        .args(["serve", "--port", "0", "--frame-len", "256", "--workers", "1"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let port = line.trim().rsplit(':').next().unwrap().to_string();
    let result = Client::connect(("127.0.0.1", port.parse::<u16>().unwrap()))
        .and_then(|mut c| c.request(&BatchRequest::new(3, 1, 10)));
    child.kill().unwrap();
    child.wait().unwrap();
    let batch = result.unwrap();
    assert_eq!(batch.header.frame_len, 256);
    assert_eq!(
        batch.metas.iter().map(|m| m.index).collect::<Vec<_>>(),
        vec![10, 11, 12]
    );
}
