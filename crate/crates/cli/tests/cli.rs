use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn packbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packbench"))
        .current_dir(dir)
        .env_remove("PACKBENCH_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = packbench(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn body(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn bench_pipeline_and_rerun_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--class", "or", "--instances", "2", "--out", "gen"]);
    ok(d, &["bench", "--manifest", "gen/datasets.manifest", "--out", "a"]);
    ok(
        d,
        &[
            "bench",
            "--manifest",
            "gen/datasets.manifest",
            "--out",
            "b",
            "--workers",
            "1",
        ],
    );
    for f in [
        "scorecard.csv",
        "ranking.csv",
        "heatmap_aeb.csv",
        "heatmap_wins.csv",
        "bins.csv",
    ] {
        assert_eq!(
            fs::read(d.join("a").join(f)).unwrap(),
            fs::read(d.join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let card = fs::read_to_string(d.join("a/scorecard.csv")).unwrap();
    for key in [
        "# seed: 0",
        "# config-hash: ",
        "# falkenauer-k: 2",
        "# lb-mode: continuous",
    ] {
        assert!(card.contains(key), "{key}");
    }
    let scorecard = body(&d.join("a/scorecard.csv"));
    assert_eq!(scorecard.lines().count(), 1 + 4 * 9);

    let ranking = body(&d.join("a/ranking.csv"));
    let sums: Vec<f64> = ranking
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(sums.windows(2).all(|w| w[0] <= w[1]));

    ok(
        d,
        &[
            "report",
            "--profile",
            "--bins",
            "a/bins.csv",
            "--scorecard",
            "a/scorecard.csv",
            "--out",
            "r",
        ],
    );
    let profile = body(&d.join("r/profile.csv"));
    let firsts: Vec<&str> = profile.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(firsts, ["pct_excess_bins", "10", "5", "2", "1", "not_won"]);
    assert!(body(&d.join("r/boxplot.csv")).starts_with("metric,heuristic,min,q1,median,q3,max"));
}

#[test]
fn single_heuristic_wins_everything() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--class", "or1", "--instances", "3", "--out", "gen"]);
    ok(
        d,
        &[
            "bench",
            "--manifest",
            "gen/datasets.manifest",
            "--portfolio",
            "BF",
            "--out",
            "o",
        ],
    );
    let card = body(&d.join("o/scorecard.csv"));
    for row in card.lines().skip(1) {
        assert_eq!(row.split(',').nth(4).unwrap(), "1.000000");
    }
}

#[test]
fn ceil_flag_and_config_file_change_the_header() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--class", "or1", "--instances", "2", "--out", "gen"]);
    fs::write(d.join("cfg.txt"), "falkenauer_k = 3\nseed=11\n").unwrap();
    ok(
        d,
        &[
            "bench",
            "--manifest",
            "gen/datasets.manifest",
            "--ceil-lb",
            "--config",
            "cfg.txt",
            "--out",
            "o",
        ],
    );
    let card = fs::read_to_string(d.join("o/scorecard.csv")).unwrap();
    assert!(card.contains("# lb-mode: ceil"));
    assert!(card.contains("# falkenauer-k: 3"));
    assert!(card.contains("# seed: 11"));
}

#[test]
fn env_override() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = Command::new(env!("CARGO_BIN_EXE_packbench"))
        .current_dir(d)
        .env("PACKBENCH_SEED", "42")
        .args(["generate", "--class", "or1", "--instances", "1", "--out", "gen"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(fs::read_to_string(d.join("gen/datasets.manifest"))
        .unwrap()
        .contains("# seed: 42"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(packbench(d, &["bench", "--nope"]).status.code(), Some(2));
    assert_eq!(
        packbench(d, &["bench", "--manifest", "missing.manifest"]).status.code(),
        Some(3)
    );
    fs::write(d.join("empty.manifest"), "# nothing\n").unwrap();
    assert_eq!(
        packbench(d, &["bench", "--manifest", "empty.manifest"]).status.code(),
        Some(2)
    );
    fs::write(d.join("gone.manifest"), "X nowhere bpplib none\n").unwrap();
    let out = packbench(d, &["bench", "--manifest", "gone.manifest"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dataset `X`"));
    ok(d, &["generate", "--class", "or1", "--instances", "1", "--out", "gen"]);
    let out = packbench(
        d,
        &["bench", "--manifest", "gen/datasets.manifest", "--portfolio", "FF,ZZ"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        packbench(d, &["tune", "--heuristic", "BF", "--budget", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(packbench(d, &["report"]).status.code(), Some(2));
}

#[test]
fn evolve_output_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "evolve",
            "--target",
            "BF",
            "--portfolio",
            "FF,BF,NF",
            "--instances",
            "3",
            "--out",
            "ev",
            "--seed",
            "4",
        ],
    );
    let manifest = body(&d.join("ev/evolved_BF.csv"));
    assert_eq!(
        manifest.lines().next().unwrap(),
        "id,bins_FF,bins_BF,bins_NF,generations,seed"
    );
    assert_eq!(manifest.lines().count(), 4);
    for row in manifest.lines().skip(1) {
        let v: Vec<usize> = row.split(',').skip(1).take(3).map(|x| x.parse().unwrap()).collect();
        assert!(v[1] < v[0] && v[1] < v[2], "{row}");
    }
    // the written instances replay to the recorded bins through bench
    ok(
        d,
        &[
            "bench",
            "--manifest",
            "ev/evolved.manifest",
            "--portfolio",
            "FF,BF,NF",
            "--out",
            "b",
        ],
    );
    let bins = body(&d.join("b/bins.csv"));
    for row in manifest.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let expect = format!("BF,{},{},{},{}", f[0], f[1], f[2], f[3]);
        assert!(bins.contains(&expect), "{expect}");
    }
}

#[test]
fn features_and_projection() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--class", "or", "--instances", "4", "--out", "gen"]);
    ok(d, &["features", "--manifest", "gen/datasets.manifest", "--out", "f"]);
    let feats = body(&d.join("f/features.csv"));
    assert_eq!(feats.lines().count(), 17);
    assert_eq!(feats.lines().next().unwrap().split(',').count(), 18);
    assert!(!feats.contains("NaN"));
    ok(
        d,
        &[
            "project",
            "--features",
            "f/features.csv",
            "--k",
            "5",
            "--svg",
            "--out",
            "p",
        ],
    );
    assert_eq!(body(&d.join("p/selected_features.csv")).lines().count(), 6);
    assert_eq!(body(&d.join("p/projection.csv")).lines().count(), 17);
    assert!(fs::read_to_string(d.join("p/projection.svg"))
        .unwrap()
        .starts_with("<svg"));
    ok(
        d,
        &[
            "features",
            "--manifest",
            "gen/datasets.manifest",
            "--label",
            "winner",
            "--out",
            "w",
        ],
    );
}

#[test]
fn tune_writes_log() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--class", "or1", "--instances", "2", "--out", "gen"]);
    ok(
        d,
        &[
            "tune",
            "--heuristic",
            "FS2",
            "--budget",
            "12",
            "--compare",
            "gen/datasets.manifest",
            "--out",
            "t",
        ],
    );
    let log = body(&d.join("t/tune_FS2.csv"));
    assert_eq!(
        log.lines().next().unwrap(),
        "eval,phase,penalty,power,train_aeb,incumbent_aeb"
    );
    assert_eq!(log.lines().count(), 13);
    assert!(fs::read_to_string(d.join("t/tune_FS2.csv"))
        .unwrap()
        .contains("# tuner: random+local"));
    assert!(body(&d.join("t/compare_FS2.csv")).starts_with("dataset,heuristic,untuned_aeb,tuned_aeb,delta\nOR1,FS2,"));
}
