use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polar-base"))
}

#[test]
fn verify_writes_reproducible_reports() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = cli()
            .args([
                "verify",
                "--kind",
                "C",
                "--n",
                "3",
                "--p",
                "2",
                "--suite",
                "axioms,sizes,maps",
                "--seed",
                "7",
                "--out",
            ])
            .arg(d.path())
            .output()
            .unwrap();
        assert!(status.status.success());
    }
    for name in ["summary.json", "axioms.csv", "sizes.csv", "maps.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let model_only = cli()
        .args([
            "model", "verify", "--kind", "C", "--n", "4", "--suite", "oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(model_only.status.code(), Some(2));
    let too_big = cli()
        .args(["frames", "enumerate", "--kind", "D", "--n", "4", "--p", "2"])
        .output()
        .unwrap();
    assert_eq!(too_big.status.code(), Some(2));
    let bad_flag = cli().args(["verify", "--kind", "Q"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn known_miss_exits_with_one() {
    let out = cli()
        .args([
            "model", "verify", "--kind", "C", "--n", "4", "--k", "2", "--suite", "lemma24",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn frames_sample_is_json() {
    let out = cli()
        .args([
            "frames", "sample", "--kind", "D", "--n", "4", "--p", "2", "--count", "3", "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let frames = v.as_array().unwrap();
    assert_eq!(frames.len(), 3);
    assert_eq!(frames[0]["points"].as_array().unwrap().len(), 8);
}
