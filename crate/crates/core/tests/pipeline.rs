//! End-to-end CLI tests: the synth-corpus/extract/run/sweep-k pipeline,
//! exit-code contract, and cross-invocation determinism.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_genreforge")
}

fn run_cli(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(binary());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn CLI");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

struct Fixture {
    _dir: tempfile::TempDir,
    manifest: PathBuf,
    features: PathBuf,
}

static FIXTURE: OnceLock<Fixture> = OnceLock::new();

fn fixture() -> &'static Fixture {
    FIXTURE.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        let (code, stdout, stderr) = run_cli(
            &["synth-corpus", "--out", corpus.to_str().unwrap(), "--seed", "42"],
            &[],
        );
        assert_eq!(code, 0, "synth-corpus failed: {stderr}");
        assert!(stdout.contains("20 clips"));

        let manifest = corpus.join("manifest.csv");
        let features = dir.path().join("features.csv");
        let (code, _, stderr) = run_cli(
            &[
                "extract",
                "--manifest",
                manifest.to_str().unwrap(),
                "--out",
                features.to_str().unwrap(),
            ],
            &[("GENREFORGE_THREADS", "1")],
        );
        assert_eq!(code, 0, "extract failed: {stderr}");
        Fixture {
            _dir: dir,
            manifest,
            features,
        }
    })
}

fn read_feature_column(path: &Path, name: &str) -> Vec<(String, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            (fields[1].to_string(), fields[col].parse().unwrap())
        })
        .collect()
}

#[test]
fn extracted_corpus_has_separated_centroids() {
    let fx = fixture();
    let rows = read_feature_column(&fx.features, "spectral_centroid_mean");
    assert_eq!(rows.len(), 20);
    let mean_of = |label: &str| {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|(l, _)| l == label)
            .map(|&(_, v)| v)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let classical = mean_of("classical");
    let metal = mean_of("metal");
    assert!(
        (metal - classical).abs() > 0.05,
        "centroid groups too close: classical {classical}, metal {metal}"
    );
}

#[test]
fn run_part1_writes_report_files_and_is_deterministic() {
    let fx = fixture();
    let dir = tempfile::tempdir().unwrap();
    let report_a = dir.path().join("a");
    let report_b = dir.path().join("b");
    for report_dir in [&report_a, &report_b] {
        let (code, stdout, stderr) = run_cli(
            &[
                "run",
                "--features",
                fx.features.to_str().unwrap(),
                "--mode",
                "part1",
                "--seed",
                "0",
                "--report-dir",
                report_dir.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(code, 0, "run failed: {stderr}");
        assert!(stdout.contains("LogisticRegression"));
        for file in ["report.txt", "report.json", "report.csv", "k_sweep.csv", "k_sweep.svg", "projection.csv", "projection.svg"] {
            assert!(report_dir.join(file).exists(), "missing {file}");
        }
    }
    let a = std::fs::read(report_a.join("report.json")).unwrap();
    let b = std::fs::read(report_b.join("report.json")).unwrap();
    assert_eq!(a, b, "same inputs and seed must give byte-identical reports");

    let csv = std::fs::read_to_string(report_a.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10); // header + nine algorithms
    let projection = std::fs::read_to_string(report_a.join("projection.csv")).unwrap();
    assert_eq!(projection.lines().count(), 21); // header + one score per file
}

#[test]
fn run_part2_emits_scatter_and_holdout() {
    let fx = fixture();
    let dir = tempfile::tempdir().unwrap();
    let report_dir = dir.path().join("part2");
    let (code, stdout, stderr) = run_cli(
        &[
            "run",
            "--features",
            fx.features.to_str().unwrap(),
            "--mode",
            "part2",
            "--holdout-only",
            "--report-dir",
            report_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 0, "run failed: {stderr}");
    assert!(stdout.contains("holdout-only accuracy"));
    assert!(report_dir.join("scatter.csv").exists());
    assert!(report_dir.join("scatter.svg").exists());
    let scatter = std::fs::read_to_string(report_dir.join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 21); // header + one point per file
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
    assert_eq!(json["config"]["knn_k"], 7);
    assert_eq!(json["holdout"].as_array().unwrap().len(), 9);
}

#[test]
fn parallel_and_serial_extraction_agree_across_processes() {
    let fx = fixture();
    let dir = tempfile::tempdir().unwrap();
    let parallel = dir.path().join("parallel.csv");
    let (code, _, stderr) = run_cli(
        &[
            "extract",
            "--manifest",
            fx.manifest.to_str().unwrap(),
            "--out",
            parallel.to_str().unwrap(),
        ],
        &[("GENREFORGE_THREADS", "4")],
    );
    assert_eq!(code, 0, "parallel extract failed: {stderr}");
    assert_eq!(
        std::fs::read(&fx.features).unwrap(),
        std::fs::read(&parallel).unwrap(),
        "thread count changed extraction output"
    );
}

#[test]
fn sweep_k_writes_one_row_per_k() {
    let fx = fixture();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let (code, _, stderr) = run_cli(
        &[
            "sweep-k",
            "--features",
            fx.features.to_str().unwrap(),
            "--mode",
            "part2",
            "--k-min",
            "1",
            "--k-max",
            "15",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 0, "sweep-k failed: {stderr}");
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,label");
    assert_eq!(lines.len(), 16);
    assert!(lines[1].starts_with("1,"));
    assert!(lines[15].starts_with("15,"));
}

#[test]
fn usage_errors_exit_with_code_1() {
    let fx = fixture();
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r");
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "--features", "f.csv", "--mode", "part3", "--report-dir", "x"],
        vec![
            "run",
            "--features",
            fx.features.to_str().unwrap(),
            "--mode",
            "part1",
            "--select",
            "a,b",
            "--report-dir",
            report.to_str().unwrap(),
        ],
        vec![
            "run",
            "--features",
            fx.features.to_str().unwrap(),
            "--mode",
            "part1",
            "--split",
            "1.5",
            "--report-dir",
            report.to_str().unwrap(),
        ],
        vec!["extract", "--manifest", "m.csv", "--out", "o.csv", "--window", "0.05", "--step", "0.1"],
        vec!["sweep-k", "--features", "f.csv", "--mode", "part1", "--k-min", "9", "--k-max", "3", "--out", "s.csv"],
        vec!["run", "--no-such-flag"],
    ];
    for args in cases {
        let (code, _, _) = run_cli(&args, &[]);
        assert_eq!(code, 1, "expected usage exit for {args:?}");
    }
    let (code, _, _) = run_cli(&["--help"], &[]);
    assert_eq!(code, 0);
}

#[test]
fn data_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // Missing manifest.
    let (code, _, stderr) = run_cli(
        &["extract", "--manifest", "/nonexistent/m.csv", "--out", "o.csv"],
        &[],
    );
    assert_eq!(code, 2, "stderr: {stderr}");

    // Missing features file.
    let (code, _, _) = run_cli(
        &[
            "run",
            "--features",
            "/nonexistent/f.csv",
            "--mode",
            "part1",
            "--report-dir",
            dir.path().join("r").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 2);

    // Single-class feature table.
    let single = dir.path().join("single.csv");
    std::fs::write(
        &single,
        "path,label,f_a\na.wav,classical,1.0\nb.wav,classical,2.0\nc.wav,classical,3.0\nd.wav,classical,4.0\n",
    )
    .unwrap();
    let (code, _, _) = run_cli(
        &[
            "run",
            "--features",
            single.to_str().unwrap(),
            "--mode",
            "part1",
            "--report-dir",
            dir.path().join("r2").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 2);

    // Unknown selected feature name.
    let fx = fixture();
    let (code, _, _) = run_cli(
        &[
            "run",
            "--features",
            fx.features.to_str().unwrap(),
            "--mode",
            "part2",
            "--select",
            "not_a_feature",
            "--report-dir",
            dir.path().join("r3").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 2);
}

#[test]
fn numerical_failures_exit_with_code_3() {
    // NaN feature values poison the scatter matrix; the LDA solve fails.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("nan.csv");
    let mut content = String::from("path,label,f_a,f_b\n");
    for i in 0..4 {
        content.push_str(&format!("a{i}.wav,classical,nan,1.0\n"));
        content.push_str(&format!("b{i}.wav,metal,2.0,nan\n"));
    }
    std::fs::write(&bad, content).unwrap();
    let (code, _, stderr) = run_cli(
        &[
            "run",
            "--features",
            bad.to_str().unwrap(),
            "--mode",
            "part1",
            "--report-dir",
            dir.path().join("r").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 3, "stderr: {stderr}");
}
