use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emi_core::corpus::tokenize;
use emi_core::synth::{session_table, speech_corpus};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn emi(workdir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emi"))
        .arg("--workdir")
        .arg(workdir)
        .args(args)
        .env_remove("EMI_DATA_DIR")
        .output()
        .expect("run emi")
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const FAST: &str = "dim = 40\nepochs = 2\nmin_count = 1\nsubsample = 1e-3\nn_boot = 200\nseed = 9\n";

fn write_config(dir: &Path) -> PathBuf {
    let p = dir.join("run.conf");
    fs::write(&p, FAST).unwrap();
    p
}

fn full_run(workdir: &Path, conf: &Path) {
    let conf = conf.to_str().unwrap();
    let speeches = fixture("speeches.jsonl");
    let series = fixture("series.csv");
    ok(emi(workdir, &["preprocess", "--config", conf, "--input", speeches.to_str().unwrap()]));
    ok(emi(workdir, &["train", "--config", conf]));
    ok(emi(workdir, &["score", "--config", conf]));
    ok(emi(workdir, &["aggregate", "--config", conf, "--emit-plot-data"]));
    ok(emi(workdir, &["trend", "--config", conf, "--emit-plot-data"]));
    ok(emi(
        workdir,
        &["analyze", "--config", conf, "--series", series.to_str().unwrap(), "--emit-plot-data"],
    ));
    ok(emi(
        workdir,
        &["crosscorr", "--config", conf, "--series", series.to_str().unwrap(), "--max-lag", "4"],
    ));
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn fixtures_match_their_generators() {
    let mut jsonl = String::new();
    for r in speech_corpus(500, 5) {
        jsonl.push_str(&serde_json::to_string(&r).unwrap());
        jsonl.push('\n');
    }
    assert!(
        fs::read_to_string(fixture("speeches.jsonl")).unwrap() == jsonl,
        "speeches.jsonl is stale; regenerate with the synthetic_corpus example"
    );
    let mut csv = Vec::new();
    session_table(3).unwrap().to_csv(&mut csv).unwrap();
    assert!(
        fs::read(fixture("series.csv")).unwrap() == csv,
        "series.csv is stale; regenerate with the synthetic_series example"
    );
}

#[test]
fn end_to_end_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let conf_dir = tempfile::tempdir().unwrap();
    let conf = write_config(conf_dir.path());
    full_run(a.path(), &conf);
    full_run(b.path(), &conf);
    let names = listing(a.path());
    assert_eq!(names, listing(b.path()));
    for expected in [
        "chunks.jsonl",
        "model.vec",
        "scores.csv",
        "aggregates.csv",
        "trend.csv",
        "coefficients.csv",
        "models.csv",
        "crosscorr.csv",
        "plot_emi_party_chamber.csv",
        "plot_series.csv",
        "manifest-analyze.json",
    ] {
        assert!(names.iter().any(|n| n == expected), "missing {expected}: {names:?}");
    }
    assert!(!names.iter().any(|n| n.starts_with(".staging")));
    for n in &names {
        assert!(
            fs::read(a.path().join(n)).unwrap() == fs::read(b.path().join(n)).unwrap(),
            "{n} differs between runs"
        );
    }

    // rerunning a stage in place reproduces its outputs
    let before = fs::read(a.path().join("scores.csv")).unwrap();
    ok(emi(a.path(), &["score", "--config", conf.to_str().unwrap()]));
    assert_eq!(before, fs::read(a.path().join("scores.csv")).unwrap());
}

#[test]
fn manifest_hashes_every_output() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path());
    let speeches = fixture("speeches.jsonl");
    ok(emi(
        dir.path(),
        &["preprocess", "--config", conf.to_str().unwrap(), "--input", speeches.to_str().unwrap()],
    ));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest-preprocess.json")).unwrap()).unwrap();
    let outputs = m["outputs"].as_array().unwrap();
    let names: Vec<&str> = outputs.iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["chunks.jsonl", "rejections.csv", "malformed.csv", "config-preprocess.txt"]
    );
    for o in outputs {
        let bytes = fs::read(dir.path().join(o["path"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let input_hash = hex::encode(Sha256::digest(fs::read(&speeches).unwrap()));
    assert!(m["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|i| i["sha256"].as_str() == Some(input_hash.as_str())));
    // the resolved config reproduces the run's settings
    let resolved = fs::read_to_string(dir.path().join("config-preprocess.txt")).unwrap();
    assert!(resolved.contains("dim = 40\n"));
    assert!(resolved.contains("chunk_target = 150\n"));
    assert_eq!(
        m["config_hash"].as_str().unwrap(),
        hex::encode(Sha256::digest(resolved.as_bytes()))
    );
}

#[test]
fn chunk_count_matches_independent_count() {
    let dir = tempfile::tempdir().unwrap();
    let speeches = fixture("speeches.jsonl");
    ok(emi(dir.path(), &["preprocess", "--input", speeches.to_str().unwrap()]));
    let rejected: std::collections::HashSet<String> = fs::read_to_string(dir.path().join("rejections.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    // 150-token chunks; a remainder under 50 joins the previous chunk
    let expected: usize = speech_corpus(500, 5)
        .iter()
        .filter(|r| !rejected.contains(&r.speech_id))
        .map(|r| {
            let n = tokenize(&r.text).len();
            if n <= 150 {
                1
            } else {
                n / 150 + usize::from(n % 150 >= 50)
            }
        })
        .sum();
    let lines = fs::read_to_string(dir.path().join("chunks.jsonl")).unwrap().lines().count();
    assert_eq!(lines, expected);
}

fn first_kept_lines(n: usize) -> Vec<String> {
    fs::read_to_string(fixture("speeches.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| l.contains("\"party\":\"D\"") && !l.contains("is_procedural") && l.len() > 800)
        .take(n)
        .map(str::to_string)
        .collect()
}

#[test]
fn corrupt_line_is_reported_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let good = first_kept_lines(2);
    let input = dir.path().join("three.jsonl");
    fs::write(&input, format!("{}\n{{\"speech_id\": \"broken\",\n{}\n", good[0], good[1])).unwrap();
    let out = ok(emi(dir.path(), &["preprocess", "--input", input.to_str().unwrap()]));
    assert!(out.contains("3 lines, 1 malformed, 2 kept"), "{out}");
    let malformed = fs::read_to_string(dir.path().join("malformed.csv")).unwrap();
    assert!(malformed.starts_with("line,error\n2,"), "{malformed}");
}

#[test]
fn too_many_corrupt_lines_fail_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let good = first_kept_lines(1);
    let input = dir.path().join("bad.jsonl");
    fs::write(&input, format!("{}\nnot json\nnot json either\n", good[0])).unwrap();
    let out = emi(dir.path(), &["preprocess", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("chunks.jsonl").exists());
}

#[test]
fn perfect_labels_give_auc_one() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path());
    let conf = conf.to_str().unwrap();
    let speeches = fixture("speeches.jsonl");
    ok(emi(dir.path(), &["preprocess", "--config", conf, "--input", speeches.to_str().unwrap()]));
    ok(emi(dir.path(), &["train", "--config", conf]));
    ok(emi(dir.path(), &["score", "--config", conf]));

    let mut rdr = csv::Reader::from_path(dir.path().join("scores.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let (ic, ie) = (
        h.iter().position(|c| c == "chunk_id").unwrap(),
        h.iter().position(|c| c == "emi").unwrap(),
    );
    let rows: Vec<(String, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[ic].to_string(), r[ie].parse().unwrap())
        })
        .collect();
    let mut sorted: Vec<f64> = rows.iter().map(|r| r.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut labels = String::from("chunk_id,label\n");
    for (id, e) in &rows {
        labels.push_str(&format!("{id},{}\n", u8::from(*e >= median)));
    }
    let lp = dir.path().join("labels.csv");
    fs::write(&lp, labels).unwrap();
    let out = ok(emi(dir.path(), &["validate-auc", "--labels", lp.to_str().unwrap()]));
    assert!(out.contains("overall AUC 1.0000"), "{out}");
    let v = fs::read_to_string(dir.path().join("validation.csv")).unwrap();
    let overall = v.lines().nth(1).unwrap();
    assert!(overall.starts_with("overall,"), "{v}");
    assert!(overall.split(',').nth(4) == Some("1.0"), "{overall}");
    assert!(v.lines().any(|l| l.starts_with("1879-1888,")), "{v}");
}

#[test]
fn missing_upstream_names_the_producing_command() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, producer) in [
        ("train", "emi preprocess"),
        ("aggregate", "emi score"),
        ("trend", "emi aggregate"),
    ] {
        let out = emi(dir.path(), &[cmd]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(producer), "{cmd}: {err}");
    }
    fs::write(dir.path().join("chunks.jsonl"), "").unwrap();
    let err = String::from_utf8_lossy(&emi(dir.path(), &["score"]).stderr).into_owned();
    assert!(err.contains("emi train"), "{err}");
}

#[test]
fn exit_codes_separate_usage_data_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(emi(dir.path(), &["train", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(emi(dir.path(), &["train", "--dim", "many"]).status.code(), Some(1));
    assert_eq!(emi(dir.path(), &["preprocess"]).status.code(), Some(1));
    assert_eq!(emi(dir.path(), &["--help"]).status.code(), Some(0));
    let missing = dir.path().join("absent.jsonl");
    assert_eq!(
        emi(dir.path(), &["preprocess", "--input", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );

    // polarization identical to EMI makes the design singular
    let mut csv = String::from("session,EMI,Pol\n");
    for s in 0..30 {
        let v = ((s * 37 % 11) as f64) / 10.0;
        csv.push_str(&format!("{},{v},{v}\n", 50 + s));
    }
    let series = dir.path().join("collinear.csv");
    fs::write(&series, csv).unwrap();
    let out = emi(dir.path(), &["analyze", "--series", series.to_str().unwrap(), "--tables", "emi-pol"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn analyze_uses_aggregates_when_series_lacks_emi() {
    let dir = tempfile::tempdir().unwrap();
    let agg: String = std::iter::once("session,party,chamber,mean_emi,n_chunks,ci_low,ci_high\n".to_string())
        .chain((60..100).map(|s| {
            let e = ((s * 13 % 17) as f64) / 10.0;
            format!("{s},,,{e},10,{},{}\n", e - 0.1, e + 0.1)
        }))
        .collect();
    fs::write(dir.path().join("aggregates.csv"), agg).unwrap();
    let series: String = std::iter::once("session,Pol\n".to_string())
        .chain((60..100).map(|s| format!("{s},{}\n", ((s * 7 % 19) as f64) / 9.0)))
        .collect();
    let sp = dir.path().join("pol.csv");
    fs::write(&sp, series).unwrap();
    ok(emi(dir.path(), &["analyze", "--series", sp.to_str().unwrap()]));
    let coefs = fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    assert!(coefs.contains("emi-pol,2,"), "{coefs}");
    assert!(coefs.contains("Pol(t-1)"), "{coefs}");
}
