//! End-to-end runs of the pcg-eval binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcg-eval"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn generate_solve_metric_round_trip() {
    let dir = tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate",
            "--domain",
            "maze",
            "--width",
            "15",
            "--height",
            "15",
            "--count",
            "3",
            "--seed",
            "7",
            "--difficulty-class",
            "2",
            "--out",
            "mazes.txt",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("mazes.txt").exists());

    let solved = run(
        dir.path(),
        &["solve", "--domain", "maze", "--file", "mazes.txt"],
    );
    assert!(solved.status.success());
    let text = stdout(&solved);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.contains("solved=true")), "{text}");

    let lenient = run(
        dir.path(),
        &[
            "metric", "--metric", "leniency", "--domain", "maze", "--file", "mazes.txt",
            "--index-a", "1",
        ],
    );
    assert!(lenient.status.success());
    let v: f64 = stdout(&lenient).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&v));
}

#[test]
fn pairwise_metric_on_platformers() {
    let dir = tempdir().unwrap();
    let gen = run(
        dir.path(),
        &[
            "generate", "--domain", "platformer", "--width", "40", "--height", "8", "--count",
            "2", "--seed", "3", "--out", "plats.txt",
        ],
    );
    assert!(gen.status.success(), "{gen:?}");
    for repr in ["normal", "concatenated", "flat"] {
        let cd = run(
            dir.path(),
            &[
                "metric", "--metric", "cd", "--domain", "platformer", "--file", "plats.txt",
                "--repr", repr,
            ],
        );
        assert!(cd.status.success(), "{cd:?}");
        let v: f64 = stdout(&cd).trim().parse().unwrap();
        assert!((0.0..=1.2).contains(&v), "{repr}: {v}");
    }

    let div = run(
        dir.path(),
        &[
            "metric", "--metric", "astar_diversity", "--domain", "platformer", "--file",
            "plats.txt", "--index-a", "0", "--index-b", "1",
        ],
    );
    assert!(div.status.success(), "{div:?}");
}

#[test]
fn single_level_metric_rejects_index_b() {
    let dir = tempdir().unwrap();
    run(
        dir.path(),
        &[
            "generate", "--domain", "maze", "--width", "10", "--height", "10", "--count", "2",
            "--seed", "1", "--difficulty-class", "1", "--out", "m.txt",
        ],
    );
    let out = run(
        dir.path(),
        &[
            "metric", "--metric", "leniency", "--domain", "maze", "--file", "m.txt",
            "--index-b", "1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_runs_and_is_deterministic() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("exp.cfg"),
        "experiment=diversity_distribution\nsizes=10x10\nn_levels=5\nseeds=4\noutput_dir=run\n",
    )
    .unwrap();
    let first = run(dir.path(), &["experiment", "--config", "exp.cfg"]);
    assert!(first.status.success(), "{first:?}");
    let samples = dir.path().join("run/samples.csv");
    let bytes_a = fs::read(&samples).unwrap();
    assert!(String::from_utf8_lossy(&bytes_a).lines().count() > 1);

    let second = run(dir.path(), &["experiment", "--config", "exp.cfg"]);
    assert!(second.status.success());
    assert_eq!(bytes_a, fs::read(&samples).unwrap());
}

#[test]
fn experiment_override_via_set() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("exp.cfg"),
        "experiment=diversity_distribution\nsizes=10x10\nn_levels=4\nseeds=4\noutput_dir=a\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["experiment", "--config", "exp.cfg", "--set", "output_dir=b", "--set", "seeds=5"],
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("b/samples.csv").exists());
    assert!(!dir.path().join("a/samples.csv").exists());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "experiment=nope\n").unwrap();
    let out = run(dir.path(), &["experiment", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_4() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["experiment", "--config", "absent.cfg"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn insufficient_solvable_exits_3() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("exp.cfg"),
        "experiment=diversity_distribution\nsizes=10x10\nn_levels=5\nseeds=1\nwall_prob=0.95\n",
    )
    .unwrap();
    let out = run(dir.path(), &["experiment", "--config", "exp.cfg"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stats_subcommand_mann_whitney_exact() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("a.csv"), "value\n1\n2\n3\n").unwrap();
    fs::write(dir.path().join("b.csv"), "value\n4\n5\n6\n").unwrap();
    let out = run(
        dir.path(),
        &[
            "stats", "--test", "mann_whitney", "--file-a", "a.csv", "--file-b", "b.csv",
            "--alternative", "less",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("statistic=0"), "{text}");
    assert!(text.contains("p_value=0.05"), "{text}");
}

#[test]
fn stats_subcommand_pearson() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("x.csv"), "value\n1\n2\n3\n4\n5\n").unwrap();
    fs::write(dir.path().join("y.csv"), "value\n2\n4\n6\n8\n10\n").unwrap();
    let out = run(
        dir.path(),
        &["stats", "--test", "pearson", "--file-a", "x.csv", "--file-b", "y.csv"],
    );
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let r: f64 = text
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("statistic="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((r - 1.0).abs() < 1e-9, "{text}");
}

#[test]
fn thread_cap_env_var_respected() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("exp.cfg"),
        "experiment=diversity_distribution\nsizes=10x10\nn_levels=4\nseeds=2\n",
    )
    .unwrap();
    let out = bin()
        .arg("--output-dir")
        .arg(dir.path())
        .args(["experiment", "--config", "exp.cfg"])
        .env("PCG_EVAL_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
