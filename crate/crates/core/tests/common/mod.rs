#![allow(dead_code)]

use std::path::{Path, PathBuf};

use msss_core::cli;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn golden_dir() -> PathBuf {
    data_dir().join("golden")
}

/// Result of an in-process CLI invocation.
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn msss<S: AsRef<str>>(args: &[S]) -> Run {
    let mut argv = vec!["msss".to_string()];
    argv.extend(args.iter().map(|a| a.as_ref().to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn p(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

/// Rebuilds the golden instance in `dir` with the same seed and inputs as the fixtures.
pub fn regenerate_golden(dir: &Path) {
    let golden = golden_dir();
    let run = msss(&[
        "setup",
        "--q",
        "64",
        "--n",
        "3",
        "--k-max",
        "4",
        "--t-max",
        "4",
        "--labels",
        "alice,bob,carol",
        "--out-dir",
        &p(dir),
        "--force",
        "--insecure-test-mode",
        "--seed",
        "5eed",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let state = dir.join("dealer-state.json");
    let bulletin = dir.join("bulletin.json");
    let run = msss(&[
        "deal",
        "--state",
        &p(&state),
        "--secrets",
        &p(&golden.join("secrets.txt")),
        "--structures",
        &p(&golden.join("structures.json")),
        "--out",
        &p(&bulletin),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    for a in [2, 3] {
        let run = msss(&[
            "pseudoshare",
            "--share",
            &p(&dir.join(format!("share-{a}.json"))),
            "--bulletin",
            &p(&bulletin),
            "--secret",
            "1",
            "--set",
            "2",
            "--out-dir",
            &p(dir),
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
    }
    let run = msss(&[
        "reconstruct",
        "--bulletin",
        &p(&bulletin),
        "--secret",
        "1",
        "--set",
        "2",
        "--report",
        &p(&dir.join("session-report.json")),
        &p(&dir.join("pseudoshare-2-1-2.json")),
        &p(&dir.join("pseudoshare-3-1-2.json")),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
}

pub const GOLDEN_FILES: &[&str] = &[
    "bulletin.json",
    "dealer-state.json",
    "share-1.json",
    "share-2.json",
    "share-3.json",
    "pseudoshare-2-1-2.json",
    "pseudoshare-3-1-2.json",
    "session-report.json",
];
