//! Acceptance: end-to-end determinism and scale. A seeded 500k-record
//! synthetic corpus must flow through `run` in under 120 seconds and under
//! 2 GiB of peak memory, and repeated runs must produce byte-identical
//! outputs apart from the run-timestamp fields isolated in report.json.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn geosocial(args: &[&str]) -> Duration {
    let started = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_geosocial"))
        .args(args)
        .status()
        .expect("spawn geosocial");
    assert!(status.success(), "geosocial {args:?} failed with {status}");
    started.elapsed()
}

/// Peak resident set of all waited-for children, in bytes.
fn peak_child_rss_bytes() -> u64 {
    let mut usage = std::mem::MaybeUninit::<libc::rusage>::zeroed();
    let rc = unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, usage.as_mut_ptr()) };
    assert_eq!(rc, 0, "getrusage failed");
    let usage = unsafe { usage.assume_init() };
    let maxrss = usage.ru_maxrss as u64;
    // Linux reports kilobytes, macOS bytes
    if cfg!(target_os = "macos") {
        maxrss
    } else {
        maxrss * 1024
    }
}

fn write_config(dir: &Path, archive: &Path, out_dir: &Path) -> PathBuf {
    let config = dir.join("run.toml");
    std::fs::write(
        &config,
        format!(
            "[inputs]\narchive = {:?}\nhierarchy = {:?}\naliases = {:?}\nmale_names = {:?}\n\
             female_names = {:?}\nstopwords = {:?}\n\n[output]\ndirectory = {:?}\n",
            archive,
            fixture("chile_hierarchy.csv"),
            fixture("chile_aliases.csv"),
            fixture("male_names.txt"),
            fixture("female_names.txt"),
            fixture("stopwords_es.txt"),
            out_dir,
        ),
    )
    .unwrap();
    config
}

#[test]
fn acceptance_11_end_to_end_determinism_and_scale() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("archive.jsonl");

    geosocial(&[
        "synth",
        "--seed",
        "11",
        "--users",
        "40000",
        "--tweets",
        "500000",
        "--hierarchy",
        fixture("chile_hierarchy.csv").to_str().unwrap(),
        "--male",
        fixture("male_names.txt").to_str().unwrap(),
        "--female",
        fixture("female_names.txt").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);

    let out_a = dir.path().join("out_a");
    let out_b = dir.path().join("out_b");
    let config = write_config(dir.path(), &archive, &out_a);
    let config_str = config.to_str().unwrap();

    let first = geosocial(&["--quiet", "run", "--config", config_str]);
    assert!(
        first < Duration::from_secs(120),
        "500k-record run took {first:?}, budget is 120 s"
    );

    let peak = peak_child_rss_bytes();
    assert!(
        peak < 2 * 1024 * 1024 * 1024,
        "peak child RSS was {} MiB, budget is 2 GiB",
        peak / (1024 * 1024)
    );

    let second =
        geosocial(&["--quiet", "run", "--config", config_str, "--out-dir", out_b.to_str().unwrap()]);
    assert!(second < Duration::from_secs(120), "second run took {second:?}");

    // byte-identical data files
    let mut names: Vec<String> = std::fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 14, "13 data files plus report.json, got {names:?}");
    for name in &names {
        if name == "report.json" {
            continue;
        }
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        assert!(!a.is_empty(), "{name} is empty");
    }

    // the report matches too once the isolated timing block is dropped
    let mut report_a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("report.json")).unwrap()).unwrap();
    let mut report_b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_b.join("report.json")).unwrap()).unwrap();
    for entry in report_a["manifest"].as_array().unwrap() {
        let name = entry.as_str().unwrap();
        assert!(out_a.join(name).is_file(), "manifest entry {name} missing on disk");
    }
    assert!(report_a.as_object().unwrap().contains_key("timing"));
    report_a.as_object_mut().unwrap().remove("timing");
    report_b.as_object_mut().unwrap().remove("timing");
    assert_eq!(report_a, report_b, "reports differ beyond the timing block");

    // sanity: the run actually processed the full corpus
    let corpus = &report_a["summary"]["corpus"];
    assert_eq!(
        corpus["tweet_count"].as_u64().unwrap() + corpus["retweet_count"].as_u64().unwrap(),
        500_000
    );

    println!(
        "ACCEPTANCE 11 PASS: 500k-record run in {:.1} s (< 120 s) at {} MiB peak (< 2048 MiB), \
         reruns byte-identical outside the report timing block",
        first.as_secs_f64(),
        peak / (1024 * 1024)
    );
}
