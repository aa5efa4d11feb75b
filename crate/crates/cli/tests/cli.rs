use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorbound"))
        .args(args)
        .current_dir(dir)
        .env_remove("TENSORBOUND_CACHE")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn emit(dir: &Path, file: &str, args: &[&str]) {
    let mut full = vec!["catalog", "emit"];
    full.extend_from_slice(args);
    let o = run(dir, &full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(dir.join(file), &o.stdout).unwrap();
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn emit_convert_round_trip() {
    let d = tempfile::tempdir().unwrap();
    emit(d.path(), "cw2.json", &["cw", "2"]);
    let o = run(d.path(), &["convert", "cw2.json", "cw2.txt"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.path().join("cw2.txt")).unwrap();
    let terms = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    assert_eq!(terms.count(), 9);
    let o = run(d.path(), &["convert", "cw2.txt", "back.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(d.path().join("back.json")).unwrap(),
        fs::read(d.path().join("cw2.json")).unwrap()
    );
}

#[test]
fn usage_and_parse_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("bad.json"), "{\"dims\": [2, 2").unwrap();
    let o = run(d.path(), &["search", "independence", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    assert_eq!(
        code(&run(d.path(), &["search", "independence", "missing.json"])),
        1
    );
    assert_eq!(code(&run(d.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(d.path(), &["catalog", "emit", "cw", "x"])), 1);
    assert_eq!(code(&run(d.path(), &["--help"])), 0);
    assert_eq!(code(&run(d.path(), &["--version"])), 0);
}

#[test]
fn degeneration_verdicts() {
    let d = tempfile::tempdir().unwrap();
    emit(d.path(), "cw1.json", &["cw", "1"]);
    fs::write(
        d.path().join("keep.json"),
        r#"{"a":[0,0,0],"b":[0,0,0],"c":[0,0,0]}"#,
    )
    .unwrap();
    fs::write(
        d.path().join("cut.json"),
        r#"{"a":[0,0,0],"b":[0,0,0],"c":[0,1,1]}"#,
    )
    .unwrap();
    let args = ["degen", "verify", "--source", "cw1.json", "--map"];

    let o = run(
        d.path(),
        &[&args[..], &["keep.json", "--claimed", "cw1.json"]].concat(),
    );
    assert_eq!(code(&o), 0);

    let o = run(
        d.path(),
        &[
            &args[..],
            &["cut.json", "--claimed", "cw1.json", "--out", "v.json"],
        ]
        .concat(),
    );
    assert_eq!(code(&o), 2);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("3 violation(s)"), "{stdout}");
    assert_eq!(
        json(&d.path().join("v.json"))["violations"]
            .as_array()
            .unwrap()
            .len(),
        3
    );

    let o = run(
        d.path(),
        &[
            "degen", "apply", "--source", "cw1.json", "--map", "cut.json",
        ],
    );
    assert_eq!(code(&o), 0);
    fs::write(d.path().join("img.json"), &o.stdout).unwrap();
    let o = run(
        d.path(),
        &[&args[..], &["cut.json", "--claimed", "img.json"]].concat(),
    );
    assert_eq!(code(&o), 0);
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "search", "sumfree", "--group", "C5", "--power", "2", "--budget", "10",
        ],
    );
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], false);
}

#[test]
fn results_do_not_depend_on_jobs_and_manifest_records_them() {
    let d = tempfile::tempdir().unwrap();
    emit(d.path(), "cw2.json", &["cw", "2"]);
    let mut digests = Vec::new();
    for jobs in ["1", "2", "4"] {
        let out = format!("r{jobs}.json");
        let o = run(
            d.path(),
            &[
                "search",
                "independence",
                "cw2.json",
                "--power",
                "2",
                "--jobs",
                jobs,
                "--out",
                &out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let m = json(&d.path().join(format!("{out}.manifest.json")));
        assert_eq!(m["config"]["jobs"], jobs.parse::<u64>().unwrap());
        assert_eq!(m["cache_hit"], false);
        assert_eq!(m["inputs"][0]["path"], "cw2.json");
        digests.push(m["result_sha256"].as_str().unwrap().to_owned());
        // Supermultiplicativity alone gives 4; the square has a larger one.
        assert_eq!(json(&d.path().join(&out))["witness"]["size"], 6);
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn cache_replays_result() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "search",
        "sumfree",
        "--group",
        "C3",
        "--power",
        "2",
        "--cache-dir",
        "cache",
        "--out",
    ];
    let first = run(d.path(), &[&args[..], &["a.json"]].concat());
    let second = run(d.path(), &[&args[..], &["b.json"]].concat());
    assert_eq!(code(&first), 0);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);
    let (ma, mb) = (
        json(&d.path().join("a.json.manifest.json")),
        json(&d.path().join("b.json.manifest.json")),
    );
    assert_eq!(ma["cache_hit"], false);
    assert_eq!(mb["cache_hit"], true);
    assert_eq!(ma["result_sha256"], mb["result_sha256"]);

    let o = run(d.path(), &[&args[..], &["c.json", "--no-cache"]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&d.path().join("c.json.manifest.json"))["cache_hit"],
        false
    );
}

#[test]
fn bounds_report_claims() {
    let d = tempfile::tempdir().unwrap();
    emit(d.path(), "cw5.json", &["cw", "5"]);
    let o = run(d.path(), &["bound", "corners", "cw5.json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["claims"]["below_q"], true);

    emit(d.path(), "m.json", &["matmul", "2", "2", "2"]);
    let o = run(d.path(), &["bound", "corners", "m.json"]);
    assert_eq!(code(&o), 2);

    let o = run(d.path(), &["bound", "omega", "--r", "3", "--u", "2.9"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["claims"]["above_two"], true);
}

#[test]
fn reproduce_digests_match_across_worker_counts() {
    let d = tempfile::tempdir().unwrap();
    let targets = [
        ("cw6-bound", 0),
        ("cw-embedding-scan", 2),
        ("group-to-cw", 0),
        ("lowertriangular", 0),
        ("lp-suite", 0),
        ("strassen-suite", 0),
    ];
    for (target, expected) in targets {
        let mut digests = Vec::new();
        for jobs in ["1", "3"] {
            let out = format!("{target}.{jobs}.json");
            let o = run(
                d.path(),
                &["reproduce", target, "--jobs", jobs, "--out", &out],
            );
            // The embedding scan finds CW_6 in the Q8 tensor, against the reference.
            assert_eq!(code(&o), expected, "{target}");
            let m = json(&d.path().join(format!("{out}.manifest.json")));
            digests.push(m["result_sha256"].clone());
        }
        assert_eq!(digests[0], digests[1], "{target}");
    }
}
