use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomcert"))
        .args(args)
        .env_remove("ATOMCERT_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn certify_trefoil_json() {
    let v = json(&["certify", &corpus("trefoil.gauss"), "--json"]);
    assert_eq!(v["kind"], "GoodClassicalKnot");
    assert_eq!(v["lower_bound"], 3);
    assert_eq!(v["good_certificate"]["evidence"]["span"], 12);
    assert_eq!(v["kauffman_lower_bound"]["kind"], "SpanLowerBound");
}

#[test]
fn kink_bracket_is_one_monomial() {
    let o = run(&["bracket", &corpus("kink.gauss")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1*A^3");
}

#[test]
fn validate_split_warns_but_succeeds() {
    let o = run(&["validate", &corpus("two_kinks_split.gauss"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["is_split"], true);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["bracket", "--no-such-flag", &corpus("kink.gauss")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["bracket", "/nonexistent/file.gauss"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gauss");
    std::fs::write(&bad, "O1+ O1+\n").unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("crossing 1"));

    let o = run(&["bracket", "--bracket-guard", "2", &corpus("trefoil.gauss")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["khovanov", "--khovanov-guard", "5", &corpus("alt6_a.gauss")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "khovanov",
        "--khovanov-guard",
        "5",
        "--force",
        &corpus("alt6_a.gauss"),
    ]);
    assert_eq!(o.status.code(), Some(2), "explicit guard wins over --force");
    let o = run(&["khovanov", "--force", &corpus("alt6_a.gauss")]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "asymptotic",
        &corpus("virtual_trefoil.gauss"),
        "--eps",
        "1",
        "--m",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn khovanov_tsv_and_json() {
    let o = run(&["khovanov", &corpus("trefoil.gauss")]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i\tj\trank"));
    assert_eq!(lines.count(), 6);
    let v = json(&["khovanov", &corpus("trefoil.gauss"), "--json"]);
    assert_eq!(v["thickness"]["thickness"], 2);
    assert_eq!(v["lemma"]["implies_bound"], true);
    assert_eq!(v["ranks"].as_array().unwrap().len(), 6);
}

#[test]
fn cable_output_parses_back() {
    let o = run(&["cable", &corpus("figure_eight.gauss"), "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.gauss");
    std::fs::write(&p, o.stdout).unwrap();
    let v = json(&["validate", p.to_str().unwrap(), "--json"]);
    assert_eq!(v["crossings"], 16);
    assert_eq!(v["components"], 2);
    assert_eq!(v["carter_genus"], 0);
    let g = json(&["good", p.to_str().unwrap(), "--json"]);
    assert_eq!(g["good"], true);
    let r = json(&["cable", &corpus("figure_eight.gauss"), "--m", "2", "--json"]);
    assert_eq!(r["report"]["cells_agree"], true);
}

#[test]
fn asymptotic_accepts_every_epsilon_form() {
    let t = corpus("trefoil.gauss");
    for (eps, m1) in [("1", "18"), ("1/2", "17"), ("0.5", "17"), ("3.", "")] {
        let o = run(&["asymptotic", &t, "--eps", eps, "--m", "1", "--json"]);
        if m1.is_empty() {
            assert_eq!(o.status.code(), Some(1), "{eps}");
            continue;
        }
        assert_eq!(o.status.code(), Some(0), "{eps}");
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let threshold = &v["report"]["entries"][0]["threshold"];
        assert_eq!(
            threshold,
            &serde_json::json!([m1.parse::<i64>().unwrap(), 1]),
            "{eps}"
        );
        assert_eq!(v["certificate"]["vacuous"], true);
    }
    assert_eq!(
        run(&["asymptotic", &t, "--eps", "0", "--m", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["asymptotic", &t, "--eps", "-1/2", "--m", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn certificates_verify_and_tampering_fails() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["certify", &corpus("figure_eight.gauss"), "--json"]);
    let cert = v["good_certificate"].clone();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let ok = run(&[
        "verify",
        path.to_str().unwrap(),
        &corpus("figure_eight.gauss"),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "verified");

    let wrong = run(&["verify", path.to_str().unwrap(), &corpus("alt6_a.gauss")]);
    assert_eq!(wrong.status.code(), Some(1));

    let mut tampered = cert;
    tampered["lower_bound"] = 5.into();
    std::fs::write(&path, tampered.to_string()).unwrap();
    let bad = run(&[
        "verify",
        path.to_str().unwrap(),
        &corpus("figure_eight.gauss"),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn corpus_summary_has_one_row_per_file_and_isolates_failures() {
    let dir = tempfile::tempdir().unwrap();
    let src = PathBuf::from(corpus(""));
    let mut n = 0;
    for e in std::fs::read_dir(&src).unwrap() {
        let p = e.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
        n += 1;
    }
    std::fs::write(dir.path().join("broken.gauss"), "O1+ U2+\n").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored\n").unwrap();
    let o = run(&["corpus", dir.path().to_str().unwrap(), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), n + 1);
    let header: Vec<&str> = text.lines().next().unwrap().split('\t').collect();
    assert!(rows.iter().all(|r| r.len() == header.len()));
    let broken = rows.iter().find(|r| r[0] == "broken.gauss").unwrap();
    assert_eq!(broken[1], "error");
    let trefoil = rows.iter().find(|r| r[0] == "trefoil.gauss").unwrap();
    assert_eq!(
        &trefoil[1..],
        [
            "ok",
            "3",
            "1",
            "0",
            "false",
            "true",
            "2",
            "0",
            "true",
            "12",
            "12",
            "2",
            "GoodClassicalKnot",
            "3",
            "-"
        ]
    );

    let v = json(&["corpus", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(v.as_array().unwrap().len(), n + 1);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_atomcert"))
        .args(["atom", "-", "--json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"O1+ O2+ U1+ U2+\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chi"], 1);
    assert_eq!(v["orientable"], false);
    assert_eq!(v["carter_genus"], 1);
}
