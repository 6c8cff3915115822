use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vrsuite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vrsuite")).args(args).env_remove("VBVR_ENCODER").env_remove("VBVR_DECODER").output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = vrsuite(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

/// Two ID and one OOD family, 3 samples each.
fn dataset(root: &Path) -> PathBuf {
    let data = root.join("data");
    for (task, split) in [("G-15", "test-id"), ("O-47", "test-id"), ("G-35", "test-ood")] {
        ok(&["generate", "--task", task, "--split", split, "--count", "3", "--out", p(&data)]);
    }
    data
}

/// A model whose candidates are the ground-truth frames for every sample
/// except `skip` ones.
fn candidates(data: &Path, root: &Path, name: &str, skip: usize) -> PathBuf {
    let dir = root.join("runs").join(name);
    let mut n = 0;
    for task in ["G-15", "O-47", "G-35"] {
        for split in ["test-id", "test-ood"] {
            for i in 0..3 {
                let src = data.join(task).join(split).join(format!("{i:06}"));
                if !src.exists() {
                    continue;
                }
                n += 1;
                if n <= skip {
                    continue;
                }
                copy_dir(&src.join("frames"), &dir.join(task).join(split).join(format!("{i:06}")).join("frames"));
            }
        }
    }
    dir
}

#[test]
fn generate_writes_count_validated_samples() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("data");
    ok(&["generate", "--task", "G-15", "--split", "test-id", "--count", "5", "--out", p(&out)]);
    let dirs: Vec<_> = fs::read_dir(out.join("G-15/test-id")).unwrap().collect();
    assert_eq!(dirs.len(), 5);
    for d in dirs {
        let d = d.unwrap().path();
        for f in ["first_frame.png", "final_frame.png", "prompt.txt", "manifest.json"] {
            assert!(d.join(f).is_file(), "{} lacks {f}", d.display());
        }
    }
    let v = ok(&["validate", "--dataset", p(&out)]);
    assert!(v.contains("5 samples, 5 passed, 0 failed"), "{v}");
    assert!(out.join("run_config.json").is_file());

    // Re-running is byte-stable.
    let before = fs::read(out.join("G-15/test-id/000003/manifest.json")).unwrap();
    ok(&["generate", "--task", "G-15", "--split", "test-id", "--count", "5", "--out", p(&out)]);
    assert_eq!(fs::read(out.join("G-15/test-id/000003/manifest.json")).unwrap(), before);
}

#[test]
fn usage_and_hard_errors() {
    assert_eq!(vrsuite(&["generate", "--task", "G-15", "--bogus"]).status.code(), Some(2));
    assert_eq!(vrsuite(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(vrsuite(&["generate", "--split", "nope", "--count", "1", "--out", "x"]).status.code(), Some(2));
    assert_eq!(vrsuite(&["--help"]).status.code(), Some(0));
    let t = tempfile::tempdir().unwrap();
    assert_eq!(vrsuite(&["generate", "--task", "Z-99", "--split", "train", "--count", "1", "--out", p(t.path())]).status.code(), Some(1));
    assert_eq!(vrsuite(&["validate", "--dataset", p(&t.path().join("missing"))]).status.code(), Some(1));
    assert_eq!(vrsuite(&["factory", "--task", "G-15", "--split", "train", "--count", "30", "--batch", "10", "--out", p(t.path())]).status.code(), Some(1));
}

#[test]
fn validate_flags_tampered_samples() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("data");
    ok(&["generate", "--task", "O-47", "--split", "train", "--count", "2", "--out", p(&out)]);
    fs::remove_file(out.join("O-47/train/000001/first_frame.png")).unwrap();
    let r = vrsuite(&["validate", "--dataset", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("FAIL") && text.contains("000001"), "{text}");
}

#[test]
fn score_report_analyze_pipeline() {
    let t = tempfile::tempdir().unwrap();
    let data = dataset(t.path());
    let oracle = candidates(&data, t.path(), "oracle", 0);
    let partial = candidates(&data, t.path(), "partial", 4);
    let reports = t.path().join("reports");
    ok(&["score", "--dataset", p(&data), "--candidates", p(&oracle), "--candidates", p(&partial), "--out", p(&reports)]);

    // One row per (sample, model).
    let mut rdr = csv::Reader::from_path(reports.join("scores.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 9 * 2);
    let models: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.get(0).unwrap()).collect();
    assert_eq!(models, ["oracle", "partial"].into());
    assert!(rows.iter().filter(|r| &r[0] == "oracle").all(|r| r[5].parse::<f64>().unwrap() >= 0.9));
    assert_eq!(rows.iter().filter(|r| &r[0] == "partial" && r[5].parse::<f64>().unwrap() == 0.0).count(), 4);
    assert!(fs::read_to_string(reports.join("diagnostics.ndjson")).unwrap().contains("missing candidate"));

    let text = ok(&["report", "--scores", p(&reports.join("scores.csv"))]);
    assert!(text.contains("oracle"));
    let mut rdr = csv::Reader::from_path(reports.join("benchmark.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in rdr.records() {
        let r = r.unwrap();
        let (o, id, ood): (f64, f64, f64) = (r[col("overall")].parse().unwrap(), r[col("id_avg")].parse().unwrap(), r[col("ood_avg")].parse().unwrap());
        assert!((o - (id + ood) / 2.0).abs() <= 0.0005 + 1e-12, "{r:?}");
    }
    let config = fs::read_to_string(reports.join("run_config.json")).unwrap();
    assert!(config.contains("\"report\""));

    // Identical inputs give identical reports.
    let first = fs::read(reports.join("benchmark.csv")).unwrap();
    let scores_first = fs::read(reports.join("scores.csv")).unwrap();
    ok(&["score", "--dataset", p(&data), "--candidates", p(&oracle), "--candidates", p(&partial), "--out", p(&reports)]);
    ok(&["report", "--scores", p(&reports.join("scores.csv"))]);
    assert_eq!(fs::read(reports.join("benchmark.csv")).unwrap(), first);
    assert_eq!(fs::read(reports.join("scores.csv")).unwrap(), scores_first);

    let ann = t.path().join("annotations.csv");
    fs::write(&ann, "sample,modelA,modelB,outcome\nG-15/test-id/0,oracle,partial,A\nO-47/test-id/1,oracle,partial,tie\nG-35/test-ood/2,partial,oracle,B\n").unwrap();
    let analysis = t.path().join("analysis");
    ok(&["analyze", "--scores", p(&reports.join("scores.csv")), "--annotations", p(&ann), "--out", p(&analysis)]);
    let wr = fs::read_to_string(analysis.join("win_ratios.csv")).unwrap();
    assert!(wr.contains("all,oracle,0.833333") && wr.contains("all,partial,0.166667"), "{wr}");
    assert!(analysis.join("run_config.json").is_file());
}

#[test]
fn analyze_reference_leaderboard() {
    let t = tempfile::tempdir().unwrap();
    let out = ok(&["analyze", "--leaderboard", "--out", p(t.path())]);
    assert_eq!(out.lines().count(), 8, "{out}");
    let csv = fs::read_to_string(t.path().join("capability.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn factory_with_faults_matches_generate() {
    let t = tempfile::tempdir().unwrap();
    let fac = t.path().join("factory");
    let gen = t.path().join("gen");
    let out = ok(&["factory", "--task", "G-16", "--split", "train", "--count", "30", "--batch", "25", "--workers", "2", "--fault-rate", "1.0", "--out", p(&fac)]);
    let events: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let stats = events.iter().find(|e| e["event"] == "stats").expect("stats event");
    assert_eq!(stats["retried"], 2);
    assert_eq!(stats["succeeded"], 2);
    ok(&["generate", "--task", "G-16", "--split", "train", "--count", "30", "--out", p(&gen)]);
    for i in [0, 17, 29] {
        let rel = format!("G-16/train/{i:06}/manifest.json");
        assert_eq!(fs::read(fac.join(&rel)).unwrap(), fs::read(gen.join(&rel)).unwrap(), "{rel}");
    }

    let dead = vrsuite(&["factory", "--task", "G-16", "--split", "train", "--count", "25", "--persistent-fault-rate", "1.0", "--out", p(&t.path().join("dead"))]);
    assert_eq!(dead.status.code(), Some(1));
}
