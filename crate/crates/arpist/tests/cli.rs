use std::process::{Command, Output};

fn arpist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arpist")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn det_bench_csv_shape() {
    let o = arpist(&["det-bench", "--n", "100", "--seed", "42"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,mean_rel_err,min_rel_err,max_rel_err");
    let methods: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["naive_tp", "plain_lupp", "atp", "aluppe", "off_anchored_tp"]);
}

#[test]
fn edge_sweep_columns_and_digits() {
    let o = arpist(&["area-stability", "--mode", "edge-sweep", "--h-min", "1e-3", "--h-max", "1", "--points", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "h,err_lt,err_arpist4,err_arpist8,err_adaptive");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1.0000000000000000e-3");
    assert_eq!(lines.count(), 2);
}

#[test]
fn poisson_columns() {
    let o = arpist(&["poisson", "--s", "0.8", "--trials", "2", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("s,E_s\n8.0000000000000004e-1,"));
}

#[test]
fn parameter_errors_exit_2() {
    for args in [
        &["det-bench", "--bogus"][..],
        &["det-bench", "--h-long", "0.001", "--h-short", "0.01"],
        &["poisson", "--s", "1.0", "--trials", "1"],
        &["converge", "--level-min", "4", "--level-max", "2"],
        &["scattered", "--degrees", "9", "--level-min", "2", "--level-max", "2"],
        &["converge", "--mesh", "/nonexistent.tri"],
        &["det-bench", "--n", "10", "--out", "/nonexistent/dir/out.csv"],
    ] {
        assert_eq!(arpist(args).status.code(), Some(2), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_arpist"))
        .args(["det-bench", "--n", "10"])
        .env("ARPIST_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_violation_exits_3() {
    // One coarse level cannot show the composite convergence order.
    let o = arpist(&["converge", "--level-min", "1", "--level-max", "1", "--check"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
    let o = arpist(&["det-bench", "--n", "500", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mesh_file_drives_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("ico2.tri");
    let out = dir.path().join("conv.csv");
    let m = mesh.to_str().unwrap();
    assert!(arpist(&["icosphere", "--level", "2", "--out", m]).status.success());
    let o = arpist(&["converge", "--mesh", m, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let direct = stdout(&arpist(&["converge", "--level-min", "2", "--level-max", "2"]));
    // Same mesh, same numbers; only the label differs.
    assert_eq!(csv.lines().nth(1).unwrap().split_once(',').unwrap().1, direct.lines().nth(1).unwrap().split_once(',').unwrap().1);
    let o = arpist(&["scattered", "--mesh", m, "--degrees", "2", "--quad-degree", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("mesh,162,2,"));
}
