use std::process::{Command, Output};

fn bpcu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpcu"))
        .args(args)
        .env("BPCU_THREADS", "2")
        .output()
        .expect("failed to launch bpcu")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lists_builtin_experiments() {
    let o = bpcu(&["list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(names.len(), 7);
    assert!(names.iter().any(|n| n == "riemann-123"));
}

#[test]
fn run_succeeds_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bpcu(&[
        "run",
        "--experiment",
        "riemann-123",
        "--nx",
        "50",
        "--tfinal",
        "0.05",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("riemann-123 (bpcu, 50x1)"));
    for f in ["field_t0.05.csv", "diag.csv", "run.log"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn unlimited_scheme_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcu(&[
        "run",
        "--experiment",
        "riemann-123",
        "--scheme",
        "cu",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("bound violation: pressure"));
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcu(&["run", "--experiment", "nope", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("shock-density"));
}

#[test]
fn invalid_cfl_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcu(&[
        "run",
        "--experiment",
        "riemann-123",
        "--cfl",
        "0.6",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cfl"));
}

#[test]
fn config_file_overrides_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(
        &cfg,
        "experiment = riemann-123\nnx = 40\nt_final = 0.02\nscheme = nodiff\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = bpcu(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("riemann-123 (nodiff, 40x1)"));
    assert!(out.join("field_t0.02.csv").exists());

    std::fs::write(&cfg, "experiment = riemann-123\nbogus = 1\n").unwrap();
    let o = bpcu(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn convergence_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcu(&[
        "convergence",
        "--experiment",
        "vortex",
        "--meshes",
        "5,10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("1/5") && text.contains("1/10"));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("h,err_rho,rate_rho"));
    assert_eq!(csv.lines().count(), 3);
}
