use std::path::Path;
use std::process::{Command, Output};

use potlll_core::harness::read_csv;
use potlll_core::{read_basis, Algo};

fn potlll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potlll")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_reduce_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let out = potlll(&["gen", "--dim", "20", "--seed", "3", "--out", path(&input)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    for (algo, beta, notion) in [("lll", None, "lll"), ("potlll", None, "pot"), ("deeplll", Some("5"), "deep")] {
        let reduced = dir.path().join(format!("{algo}.txt"));
        let stats = dir.path().join(format!("{algo}.json"));
        let mut args = vec!["reduce", "--algo", algo, "--delta", "0.99", "--in", path(&input), "--out", path(&reduced)];
        args.extend(["--stats-json", path(&stats)]);
        if let Some(b) = beta {
            args.extend(["--beta", b]);
        }
        let out = potlll(&args);
        assert_eq!(code(&out), 0, "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
        assert!(json["loop_iterations"].as_u64().unwrap() > 0);

        let mut args = vec!["verify", "--notion", notion, "--delta", "0.99", "--in", path(&reduced)];
        if let Some(b) = beta {
            args.extend(["--beta", b]);
        }
        let out = potlll(&args);
        assert_eq!(code(&out), 0, "{notion}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(read_basis(&reduced).unwrap().rank(), 20);
    }
}

#[test]
fn unreduced_input_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("b.txt");
    std::fs::write(&file, "[[1 0]\n[7 2]\n]\n").unwrap();
    let out = potlll(&["verify", "--notion", "lll", "--delta", "0.99", "--in", path(&file)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not reduced"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "[[1 0]\n[0 x]]").unwrap();
    let out = potlll(&["verify", "--notion", "lll", "--delta", "0.99", "--in", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&potlll(&["verify", "--notion", "lll", "--in", path(&missing)])), 2);
    assert_eq!(code(&potlll(&["reduce", "--algo", "nope", "--in", "a", "--out", "b"])), 2);
    let out = dir.path().join("o.txt");
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "[[1 0][0 1]]").unwrap();
    assert_eq!(code(&potlll(&["reduce", "--algo", "bkz", "--in", path(&good), "--out", path(&out)])), 2);
    assert_eq!(
        code(&potlll(&["reduce", "--algo", "lll", "--delta", "0.2", "--in", path(&good), "--out", path(&out)])),
        2
    );
    assert_eq!(code(&potlll(&["bench", "--dims", "40:20:5", "--seeds", "1", "--algos", "lll", "--csv", "x"])), 2);
    assert_eq!(code(&potlll(&[])), 2);
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let json = dir.path().join("r.jsonl");
    let out = potlll(&[
        "bench",
        "--dims",
        "10:20:10",
        "--seeds",
        "2",
        "--algos",
        "lll,potlll2,deeplll:3,bkz:4",
        "--csv",
        path(&csv),
        "--json",
        path(&json),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(records.len(), 2 * 2 * 4);
    assert!(records.iter().any(|r| r.algo == Algo::DeepLll { beta: 3 } && r.dim == 20));
    assert_eq!(std::fs::read_to_string(&json).unwrap().lines().count(), 16);
    assert!(String::from_utf8_lossy(&out.stdout).contains("BKZ-4"));
}
