use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_core-qkd"))
}

#[test]
fn run_writes_a_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("small.cfg");
    std::fs::write(
        &spec,
        "[experiment]\nname = small\ntrials = 2\n[session]\nn_blocks = 20\n[sweep]\neve = none, guess_core\n",
    )
    .unwrap();
    let out = dir.path().join("report.jsonl");
    let status = bin()
        .args([
            "run",
            spec.to_str().unwrap(),
            "--seed",
            "4",
            "--format",
            "json-lines",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("\"eve\":\"guess_core\""));
}

#[test]
fn same_seed_same_stdout() {
    let run = || {
        bin()
            .args(["run", "bootstrap-sift", "--seed", "9"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("experiment,point,mode"));
}

#[test]
fn parse_errors_exit_nonzero_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.cfg");
    std::fs::write(&spec, "[session]\nnoise = 1.5\n").unwrap();
    let out = bin()
        .args(["run", spec.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2: noise"), "{err}");

    let out = bin().args(["run", "no-such-experiment"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn demo_prints_a_trace() {
    let out = bin().args(["demo", "--blocks", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("block 1: E1"), "{text}");
    assert!(text.contains("accepted"));
}
