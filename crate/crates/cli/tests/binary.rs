use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gaoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaoi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SWAP: &str = r#"
[model]
kind = "stationary"
alphabet_size = 2
px_rows = [[0.0, 1.0], [1.0, 0.0]]
dwell = { homogeneous = 0.6 }

[policy]
kind = "periodic"
period = 50
delay = { deterministic = 0 }

[run]
horizon = 1000
num_paths = 400
base_seed = 7
"#;

fn csv_row(text: &str) -> Vec<f64> {
    let line = text.lines().last().unwrap();
    line.split(',').map(|f| f.parse().unwrap()).collect()
}

#[test]
fn entropy_rate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write_config(dir.path(), "swap.toml", SWAP);
    let out = gaoi(&["entropy-rate", "--config", &swap]);
    assert_eq!(out.status.code(), Some(0));
    let row = csv_row(&stdout(&out));
    assert!((row[0] - 0.970951).abs() < 1e-6);
    assert!((row[1] - 0.6).abs() < 1e-12);

    let uniform = write_config(
        dir.path(),
        "uniform.toml",
        r#"
[model]
kind = "stationary"
px_rows = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]]
dwell = { homogeneous = 0.5 }
"#,
    );
    let out = gaoi(&["entropy-rate", "--config", &uniform]);
    assert_eq!(out.status.code(), Some(0));
    assert!((csv_row(&stdout(&out))[0] - 1.5).abs() < 1e-9);

    let cycle = write_config(
        dir.path(),
        "cycle.toml",
        r#"
[model]
kind = "stationary"
px_rows = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
dwell = { prefix = [0.0], tail = 1.0 }
"#,
    );
    let out = gaoi(&["entropy-rate", "--config", &cycle]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_row(&stdout(&out))[0], 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "typo.toml", &SWAP.replace("period =", "perod ="));
    assert_eq!(gaoi(&["entropy-rate", "--config", &typo]).status.code(), Some(2));

    let missing = dir.path().join("nope.toml");
    assert_eq!(
        gaoi(&["entropy-rate", "--config", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(gaoi(&["entropy-rate", "--preset", "fig9"]).status.code(), Some(2));
    assert_eq!(gaoi(&["entropy-rate", "--preset", "fig6"]).status.code(), Some(2));
    assert_eq!(gaoi(&["verify", "thm2", "--preset", "fig5-fast"]).status.code(), Some(2));
    assert_eq!(gaoi(&["verify", "thm1", "--preset", "fig6"]).status.code(), Some(2));

    let reducible = write_config(
        dir.path(),
        "reducible.toml",
        r#"
[model]
kind = "stationary"
px_rows = [[0.0, 1.0], [0.0, 1.0]]
dwell = { homogeneous = 0.5 }
"#,
    );
    assert_eq!(gaoi(&["entropy-rate", "--config", &reducible]).status.code(), Some(3));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out_dir = blocker.join("out");
    let out = gaoi(&["simulate", "--preset", "fig6", "--paths", "10", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn thm1_passes_and_reports_three_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write_config(dir.path(), "swap.toml", SWAP);
    let out = gaoi(&["verify", "thm1", "--config", &swap]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("analytic scaled quantities"));
    assert!(text.contains("AoI") && text.contains("delay/p") && text.contains("GAoI/rate"));
}

#[test]
fn thm1_zero_rate_marks_gaoi_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = SWAP.replace("dwell = { homogeneous = 0.6 }", "dwell = { homogeneous = 1.0 }");
    let path = write_config(dir.path(), "cycle.toml", &cycle);
    let out = gaoi(&["verify", "thm1", "--config", &path]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("GAoI/rate n/a"));
}

#[test]
fn thm2_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("none.txt"), "# no updates\n").unwrap();
    let path = write_config(
        dir.path(),
        "tiny.toml",
        r#"
[model]
kind = "bayesian"
bayes_p = 0.5

[policy]
kind = "explicit"
schedule = "none.txt"

[run]
horizon = 2
num_paths = 2000
base_seed = 3
"#,
    );
    let out = gaoi(&["verify", "thm2", "--config", &path]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("C(2) 1.5"), "{text}");
    assert!(text.contains("explicit (fixed delay): residual 1.5"), "{text}");
}

#[test]
fn failed_verification_exits_one() {
    // one path has zero standard error, so the ensemble residual cannot
    // match C(T) within three of them
    let out = gaoi(&["verify", "thm2", "--preset", "fig6", "--paths", "1"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("[FAIL]"));
}

#[test]
fn simulate_writes_csvs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write_config(dir.path(), "swap.toml", SWAP);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let res = gaoi(&[
            "simulate", "--config", &swap, "--paths", "1", "--seed", "11", "--threads", threads,
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(0));
    }
    for file in ["summary.csv", "series.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
    }
    let summary = fs::read_to_string(a.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), gaoi_cli::output::SUMMARY_HEADER);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 12);
    assert_eq!(&row[..3], &["periodic", "1", "1000"]);
    assert_eq!(row[11], "");

    let series = fs::read_to_string(a.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 1001);
    assert!(series.starts_with("n,mean_aoi,mean_gaoi,mean_cum_aoi,mean_cum_gaoi\n0,0,0,0,0\n"));
}

#[test]
fn preset_simulation_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = gaoi(&["simulate", "--preset", "fig6", "--paths", "200", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary, stdout(&out));
    for line in summary.lines().skip(1) {
        let row: Vec<&str> = line.split(',').collect();
        assert_eq!(row[3], "");
        assert_eq!(row[4], "");
        assert_eq!(row[10], "");
        assert!(row[11].parse::<f64>().is_ok());
    }
    assert!(dir.path().join("periodic/series.csv").exists());
    assert!(dir.path().join("greedy/series.csv").exists());
}
