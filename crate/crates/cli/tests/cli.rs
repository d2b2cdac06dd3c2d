use std::path::Path;
use std::process::{Command, Output};

fn leadlag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leadlag"))
        .args(args)
        .env_remove("LEADLAG_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> String {
    let file = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(file).unwrap()
}

#[test]
fn help_matches_golden_files() {
    assert_eq!(stdout(&leadlag(&["--help"])), golden("help.txt"));
    for cmd in ["simulate", "leadlag", "lift", "pvar", "ode", "experiment"] {
        assert_eq!(
            stdout(&leadlag(&[cmd, "--help"])),
            golden(&format!("{cmd}.txt")),
            "{cmd} --help"
        );
    }
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a.csv"),
        dir.path().join("b.csv"),
        dir.path().join("c.csv"),
    );
    for (file, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        let o = leadlag(&[
            "simulate",
            "--n",
            "64",
            "--dim",
            "2",
            "--seed",
            seed,
            "--out",
            path(file),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn seed_comes_from_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_leadlag"));
        cmd.args(["simulate", "--n", "8"])
            .env_remove("LEADLAG_SEED");
        if let Some(v) = env {
            cmd.env("LEADLAG_SEED", v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        cmd.output().unwrap()
    };
    assert_eq!(
        stdout(&run(Some("11"), None)),
        stdout(&run(None, Some("11")))
    );
    assert_eq!(
        stdout(&run(Some("12"), Some("11"))),
        stdout(&run(None, Some("11")))
    );
    assert_ne!(
        stdout(&run(Some("12"), None)),
        stdout(&run(None, Some("11")))
    );
    assert_eq!(code(&run(Some("x"), None)), 2);
}

#[test]
fn resolved_config_goes_to_stderr() {
    let o = leadlag(&["simulate", "--n", "4", "--kind", "sine:2", "--seed", "3"]);
    let err = stderr(&o);
    for line in ["[simulate]", "kind = sine:2", "n = 4", "seed = 3"] {
        assert!(err.contains(line), "missing '{line}' in {err}");
    }
    assert!(stdout(&o).starts_with("t,x1\n"));
}

#[test]
fn pvar_of_identical_skeletons_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s.csv");
    let skel = dir.path().join("k.csv");
    assert_eq!(
        code(&leadlag(&["simulate", "--n", "64", "--out", path(&series)])),
        0
    );
    let o = leadlag(&[
        "lift",
        "--in",
        path(&series),
        "--n",
        "16",
        "--out",
        path(&skel),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("pvar_norm = "));
    let o = leadlag(&["pvar", "--a", path(&skel), "--b", path(&skel)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn ode_on_linear_signal_integrates_t() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("lin.csv");
    assert_eq!(
        code(&leadlag(&[
            "simulate",
            "--kind",
            "linear",
            "--n",
            "1024",
            "--out",
            path(&series)
        ])),
        0
    );
    let o = leadlag(&[
        "ode",
        "--in",
        path(&series),
        "--n",
        "1024",
        "--field",
        "linear",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let y: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("Y = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((y - 0.5).abs() <= 1e-2, "Y = {y}");
    assert!(out.contains("ito = ") && out.contains("strat = "));
}

#[test]
fn leadlag_writes_both_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s.csv");
    assert_eq!(
        code(&leadlag(&[
            "simulate",
            "--kind",
            "linear",
            "--n",
            "4",
            "--out",
            path(&series)
        ])),
        0
    );
    let o = leadlag(&["leadlag", "--in", path(&series)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,b1,f1"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn experiment_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nseeds = 2\nn_values = 16,64\nfine_log2 = 8\nseed = 1\n",
    )
    .unwrap();
    let o = leadlag(&[
        "experiment",
        "--name",
        "ito-recovery",
        "--config",
        path(&cfg),
        "--set",
        "seeds=3",
        "--seed",
        "9",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let err = stderr(&o);
    assert!(
        err.contains("seeds = 3") && err.contains("seed = 9") && err.contains("fine_log2 = 8"),
        "{err}"
    );
    let table = std::fs::read_to_string(dir.path().join("ito-recovery.csv")).unwrap();
    assert!(table.starts_with("statistic,n,mesh,mean,std_error,seeds\n"));
    assert!(dir.path().join("ito-recovery.manifest.json").is_file());
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.cfg");
    std::fs::write(&bad_cfg, "seeds = 2\nbogus = 1\n").unwrap();
    let garbage = dir.path().join("garbage.csv");
    std::fs::write(&garbage, "t,x1\n0,0\nzero,1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["simulate", "--unknown"],
        vec!["simulate", "--n", "minus"],
        vec!["simulate", "--kind", "levy"],
        vec!["simulate", "--dim", "0"],
        vec!["lift", "--in", "/nonexistent/series.csv"],
        vec!["lift", "--in", path(&garbage)],
        vec![
            "pvar",
            "--a",
            "/nonexistent/a.csv",
            "--b",
            "/nonexistent/b.csv",
        ],
        vec!["experiment", "--name", "unknown"],
        vec![
            "experiment",
            "--name",
            "ito-recovery",
            "--config",
            path(&bad_cfg),
        ],
        vec!["experiment", "--name", "ito-recovery", "--set", "p=1.5"],
    ];
    for args in cases {
        let o = leadlag(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "seeds = 2\nbogus = 1\n").unwrap();
    let o = leadlag(&[
        "experiment",
        "--name",
        "ito-recovery",
        "--config",
        path(&cfg),
    ]);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn dimension_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let two = dir.path().join("two.csv");
    let (k1, k2) = (dir.path().join("k1.csv"), dir.path().join("k2.csv"));
    assert_eq!(
        code(&leadlag(&["simulate", "--n", "8", "--out", path(&one)])),
        0
    );
    assert_eq!(
        code(&leadlag(&[
            "simulate",
            "--n",
            "8",
            "--dim",
            "2",
            "--out",
            path(&two)
        ])),
        0
    );
    assert_eq!(
        code(&leadlag(&["lift", "--in", path(&one), "--out", path(&k1)])),
        0
    );
    assert_eq!(
        code(&leadlag(&["lift", "--in", path(&two), "--out", path(&k2)])),
        0
    );
    assert_eq!(
        code(&leadlag(&["pvar", "--a", path(&k1), "--b", path(&k2)])),
        2
    );
    assert_eq!(
        code(&leadlag(&["ode", "--in", path(&one), "--y0", "0,0"])),
        2
    );
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing-dir").join("s.csv");
    let o = leadlag(&["simulate", "--n", "8", "--out", path(&target)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}
