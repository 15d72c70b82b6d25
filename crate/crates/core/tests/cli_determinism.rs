use std::path::Path;
use std::process::Command;

fn nihcoll(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_nihcoll")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

/// Runs `args` in two fresh directories and compares stdout and every named file.
fn assert_reproducible(args: &[&str], files: &[&str]) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (code_a, out_a) = nihcoll(a.path(), args);
    let (code_b, out_b) = nihcoll(b.path(), args);
    assert_eq!(code_a, 0, "{args:?}: {}", String::from_utf8_lossy(&out_a));
    assert_eq!(code_a, code_b);
    assert_eq!(out_a, out_b, "{args:?}");
    for f in files {
        let (x, y) = (std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
        assert!(!x.is_empty(), "{f} is empty");
        assert_eq!(x, y, "{args:?}: {f} differs");
    }
}

#[test]
fn seeded_commands_are_byte_identical() {
    assert_reproducible(&["coll", "run", "--k", "3", "--ell", "4", "--seed", "7", "--csv", "r.csv", "--instance", "i.json"], &["r.csv", "i.json"]);
    assert_reproducible(
        &["reduce", "run", "--k", "2", "--m", "2", "--seed", "3", "--trials", "300", "--solver", "honest", "--csv", "t.csv"],
        &["t.csv"],
    );
    assert_reproducible(&["reduce", "dump", "--k", "2", "--m", "2", "--seed", "3", "--out", "a.json"], &["a.json"]);
    assert_reproducible(&["bphp", "gen", "--n", "4", "--m", "5", "--dimacs", "f.cnf", "--ineq", "f.json"], &["f.cnf", "f.json"]);
    assert_reproducible(&["bounds", "table", "--n", "256,65536", "--k", "2,4", "--csv", "b.csv"], &["b.csv"]);
    assert_reproducible(&["gadget", "verify", "--k", "5"], &[]);
}

#[test]
fn proof_pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = ["proof", "synth", "--vars", "8", "--leaves", "20", "--seed", "4", "--proof", "p.json", "--system", "s.json"];
    assert_eq!(nihcoll(d, &synth).0, 0);
    let first = std::fs::read(d.join("p.json")).unwrap();
    assert_eq!(nihcoll(d, &synth).0, 0);
    assert_eq!(std::fs::read(d.join("p.json")).unwrap(), first);

    let (code, _) = nihcoll(d, &["proof", "convert", "--in", "p.json", "--system", "s.json", "--out", "dt.json"]);
    assert_eq!(code, 0);
    let (code, _) = nihcoll(d, &["proof", "convert", "--in", "p.json", "--out", "dt2.json", "--trust"]);
    assert_eq!(code, 0);
    let run = ["proof", "run", "--dt", "dt.json", "--system", "s.json", "--partition", "even:3", "--exhaustive", "--csv", "run.csv"];
    let (code, out) = nihcoll(d, &run);
    assert_eq!(code, 0);
    let summary: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(summary["assignments"], 256);
    assert_eq!(summary["failures"], 0);
    let csv = std::fs::read_to_string(d.join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);

    let (code, out) = nihcoll(d, &["proof", "run", "--dt", "dt.json", "--system", "s.json", "--partition", "even:2", "--assignment", "01100101"]);
    assert_eq!(code, 0);
    let one: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(one["violated"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nihcoll(dir.path(), &["--version"]).0, 0);
    assert_eq!(nihcoll(dir.path(), &["coll", "run", "--k", "2"]).0, 2);
    assert_eq!(nihcoll(dir.path(), &["coll", "run", "--k", "2", "--ell", "3", "--m", "9"]).0, 2);
    assert_eq!(nihcoll(dir.path(), &["proof", "convert", "--in", "missing.json", "--out", "x.json"]).0, 2);
    let (code, out) = nihcoll(dir.path(), &["bphp", "gen", "--n", "2", "--m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, b"p cnf 3 6\n1 2 0\n-1 -2 0\n1 3 0\n-1 -3 0\n2 3 0\n-2 -3 0\n");
}
