use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vra")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = vra(args);
    assert!(
        out.status.success(),
        "vra {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_of(out: &Output) -> Value {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last = stderr.lines().last().expect("error line");
    serde_json::from_str(last).unwrap_or_else(|_| panic!("not JSON: {stderr}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn synth_is_byte_identical_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for dir in [&a, &b] {
        ok(&["synth", "--seed", "7", "--media-videos", "1", "--out", p(dir)]);
    }
    ok(&["synth", "--seed", "8", "--out", p(&c)]);
    let (ta, tb) = (tree_bytes(&a), tree_bytes(&b));
    assert!(ta.len() > 1400);
    assert_eq!(ta, tb);
    let manifest = |d: &Path| std::fs::read(d.join("manifest_c3.csv")).unwrap();
    assert_ne!(manifest(&a), manifest(&c));
}

#[test]
fn media_pipeline_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("data");
    ok(&["synth", "--media-videos", "2", "--frames", "3", "--out", p(&root)]);
    let full = std::fs::read_to_string(root.join("manifest_c3.csv")).unwrap();
    let manifest = root.join("two.csv");
    std::fs::write(&manifest, full.lines().take(3).collect::<Vec<_>>().join("\n") + "\n").unwrap();

    let crops = tmp.path().join("crops");
    let out = ok(&["crop", "--manifest", p(&manifest), "--boxes", p(&root.join("boxes")), "--out", p(&crops)]);
    assert!(out.contains("\"cropped\":2"));
    let regions: Value = serde_json::from_str(&std::fs::read_to_string(crops.join("regions.json")).unwrap()).unwrap();
    assert_eq!(regions["p01"]["source_video_id"], "target-p01");

    let one = tmp.path().join("one.csv");
    ok(&["extract", "--frames", p(&crops.join("c3-s01-p01-0")), "--model", "gmlog", "--out", p(&one)]);
    let text = std::fs::read_to_string(&one).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.split(',').count() == 40));

    let feats = tmp.path().join("feats");
    ok(&["extract", "--manifest", p(&manifest), "--frames", p(&crops), "--model", "brisque", "--out", p(&feats)]);
    let table = tmp.path().join("table.csv");
    ok(&["fuse", "--manifest", p(&manifest), "--features", p(&feats), "--out", p(&table)]);
    let header = std::fs::read_to_string(&table).unwrap();
    assert_eq!(header.lines().next().unwrap().split(',').count(), 1 + 72);
}

#[test]
fn select_train_eval_and_inter_subset() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    ok(&["synth", "--out", p(root)]);
    let feats = root.join("features");
    for subset in ["c2", "c3"] {
        ok(&[
            "fuse",
            "--manifest",
            p(&root.join(format!("manifest_{subset}.csv"))),
            "--features",
            p(&feats),
            "--out",
            p(&root.join(format!("{subset}.csv"))),
        ]);
    }
    let config = root.join("vra.toml");
    std::fs::write(
        &config,
        "[bench]\niterations = 2\n[bench.grid]\nc = [1.0, 10.0]\ngamma = [0.01, 0.1]\n[bench.selection]\nstage2_iterations = 10\n",
    )
    .unwrap();
    let cfg = p(&config);
    let m3 = root.join("manifest_c3.csv");
    let (c2, c3) = (root.join("c2.csv"), root.join("c3.csv"));

    ok(&["--config", cfg, "select", "--manifest", p(&m3), "--features", p(&c3), "--out", p(&root.join("sel.json"))]);
    let sel: Value = serde_json::from_str(&std::fs::read_to_string(root.join("sel.json")).unwrap()).unwrap();
    assert_eq!(sel["selected_indices"].as_array().unwrap().len() as u64, sel["k"].as_u64().unwrap());

    ok(&["--config", cfg, "train", "--manifest", p(&m3), "--features", p(&c3), "--out", p(&root.join("model.json"))]);
    let m2 = root.join("manifest_c2.csv");
    let eval = ok(&["eval", "--manifest", p(&m2), "--features", p(&c2), "--model", p(&root.join("model.json")), "--level", "method"]);
    let eval: Value = serde_json::from_str(&eval).unwrap();
    assert_eq!(eval["metrics"]["n"], 13);
    assert!(eval["metrics"]["srcc"].as_f64().unwrap() > 0.8);

    let intra = root.join("intra.json");
    ok(&["--config", cfg, "bench", "--manifest", p(&m3), "--features", p(&c3), "--protocol", "submit-id", "--out", p(&intra)]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&intra).unwrap()).unwrap();
    assert_eq!(report["iterations"].as_array().unwrap().len(), 2);
    assert_eq!(report["protocol"], "submit-id");
    assert!(report["metadata"]["created_unix"].as_u64().is_some());

    let inter = ok(&[
        "--config", cfg, "bench", "--protocol", "inter", "--manifest", p(&m2), "--features", p(&c2),
        "--train-manifest", p(&m3), "--train-features", p(&c3), "--intra-report", p(&intra),
    ]);
    let inter: Value = serde_json::from_str(&inter).unwrap();
    assert_eq!(inter["protocol"], "inter");
    assert_eq!(inter["n_videos"], 520);
    assert!(inter["aggregate"]["srcc"]["mean"].as_f64().unwrap() > 0.8);
}

#[test]
fn errors_are_machine_readable() {
    let tmp = tempfile::tempdir().unwrap();
    let e = error_of(&vra(&["bench", "--manifest", "missing.csv", "--features", "brisque"]));
    assert_eq!(e["error"]["kind"], "missing-file");
    assert!(e["error"]["hint"].is_string());

    let out = vra(&["bench", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "usage");

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[bnech]\niterations = 3\n").unwrap();
    let out = vra(&["--config", p(&bad), "synth", "--out", p(&tmp.path().join("s"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "config");

    ok(&["synth", "--out", p(tmp.path())]);
    let m = tmp.path().join("manifest_c3.csv");
    let out = vra(&["bench", "--manifest", p(&m), "--features", "brisque"]);
    let e = error_of(&out);
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["hint"].as_str().unwrap().contains("--frames"));

    let out = vra(&["bench", "--manifest", p(&m), "--features", p(&tmp.path().join("features")), "--protocol", "inter"]);
    assert_eq!(error_of(&out)["error"]["kind"], "config");
}

#[test]
fn bench_with_random_baseline_and_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--out", p(tmp.path())]);
    let m = tmp.path().join("manifest_c3.csv");
    let f = tmp.path().join("features");
    let run = || {
        let out = ok(&["--jobs", "1", "bench", "--manifest", p(&m), "--features", p(&f), "--baseline", "random", "--iterations", "20"]);
        let mut v: Value = serde_json::from_str(&out).unwrap();
        v.as_object_mut().unwrap().remove("metadata");
        v
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a["iterations"].as_array().unwrap().len(), 20);
    assert!(a["aggregate"]["srcc"]["mean"].as_f64().unwrap().abs() < 0.15);
}
