use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sptchain"))
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no row {key}"))
        .parse()
        .unwrap()
}

#[test]
fn exact_reports_string_orders_and_occupancies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "ed.cfg",
        "preset = ed\nn_sites = 11\nmode = exact\n",
    );
    let out = run(&["exact", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("# sptchain-csv v1 exact\nobservable,value\n"));
    assert!((value(&csv, "abs_Oz1") - 0.964).abs() < 0.01);
    assert!(value(&csv, "abs_Oz0") < 0.05);
    assert!(value(&csv, "occupancy_10") < 0.1);
}

#[test]
fn exact_at_s_zero_has_no_string_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "bz.cfg",
        "j1 = 0\nj1p = 0\nj2 = 0\nbz = 2.5\nn_sites = 7\nmode = exact\ns = 0\n",
    );
    let out = run(&["exact", "--config", cfg.to_str().unwrap()]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(value(&csv, "abs_Oz0") < 1e-12 && value(&csv, "abs_Oz1") < 1e-12);
}

#[test]
fn config_errors_exit_with_one_and_cite_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "bad.cfg", "preset = ed\n\nn_sites = 8\n");
    let out = run(&["exact", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("odd"), "{err}");

    let cfg = write_cfg(dir.path(), "dt.cfg", "preset = ed\nn_sites = 7\ndt = 0.4\n");
    assert_eq!(
        run(&["trajectory", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let missing = dir.path().join("absent.cfg");
    assert_eq!(
        run(&["exact", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn oversized_dense_problem_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "big.cfg",
        "preset = ed\nn_sites = 15\nmode = exact\n",
    );
    assert_eq!(
        run(&["exact", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trajectory_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "t.cfg",
        "preset = ed\nn_sites = 7\n[sampling]\nshots = 500\nn_seeds = 3\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let st = run(&[
            "trajectory",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 13);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0], "0.0");
    assert_eq!(first[3], "0.0");
    let last: Vec<&str> = rows[12].split(',').collect();
    assert_eq!(last[7], "1.0");

    let c = dir.path().join("c.csv");
    run(&[
        "trajectory",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_ne!(std::fs::read(&c).unwrap(), std::fs::read(&a).unwrap());
}

#[test]
fn trajectory_endpoint_matches_exact_run() {
    let dir = tempfile::tempdir().unwrap();
    let t = write_cfg(
        dir.path(),
        "t.cfg",
        "preset = ed\nn_sites = 7\n[sampling]\nshots = 200\nn_seeds = 2\n",
    );
    let e = write_cfg(
        dir.path(),
        "e.cfg",
        "preset = ed\nn_sites = 7\nmode = exact\n",
    );
    let traj =
        String::from_utf8(run(&["trajectory", "--config", t.to_str().unwrap()]).stdout).unwrap();
    let exact = String::from_utf8(run(&["exact", "--config", e.to_str().unwrap()]).stdout).unwrap();
    let last: f64 = traj
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(6)
        .unwrap()
        .parse()
        .unwrap();
    assert!((last - value(&exact, "abs_Oz1")).abs() < 0.05);
}

#[test]
fn sweep_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "s.cfg", "preset = ed-supplement\nn_sites = 7\n");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "phi",
        "--values",
        "0,0.2",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("# sptchain-csv v1 sweep\nparam,value,s,abs_Oz1\n"));
    assert_eq!(csv.lines().count(), 2 + 2 * 13);
    let bad = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "omega",
    ]);
    assert_ne!(bad.status.code(), Some(0));
    let empty = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "phi",
        "--values",
        "",
    ]);
    assert_ne!(empty.status.code(), Some(0));
    let short = write_cfg(dir.path(), "short.cfg", "preset = ed\nn_sites = 5\n");
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            short.to_str().unwrap(),
            "--param",
            "phi"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn sample_dump_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "d.cfg",
        "preset = ed\nn_sites = 7\nshots = 16\nseed = 3\n",
    );
    let out = run(&[
        "sample-dump",
        "--config",
        cfg.to_str().unwrap(),
        "--step",
        "0",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# sites=7 seed=3 postselected=true"));
    assert!(lines.all(|l| l == "0101010"));
    let raw = run(&[
        "sample-dump",
        "--config",
        cfg.to_str().unwrap(),
        "--step",
        "0",
        "--no-postselect",
    ]);
    assert!(String::from_utf8(raw.stdout)
        .unwrap()
        .starts_with("# sites=7 seed=3 postselected=false"));
}

#[test]
fn recompile_writes_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "r.cfg",
        "preset = ed\nn_sites = 5\nt_total = 0.5\n[ansatz]\nm_rounds = 2\n",
    );
    let circuits = dir.path().join("circuits");
    let out = run(&[
        "recompile",
        "--config",
        cfg.to_str().unwrap(),
        "--circuits",
        circuits.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3);
    let text = std::fs::read_to_string(circuits.join("point_02.txt")).unwrap();
    let c = sptchain::circuits::Circuit::from_text(&text).unwrap();
    assert_eq!(c.two_qubit_count(), 8);
}
