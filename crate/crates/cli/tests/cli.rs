use std::path::PathBuf;
use std::process::{Command, Output};

use aor_precond::harness::counterexample_6x6;
use aor_precond::mm::{save_matrix, MmLayout};
use aor_precond::Matrix;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_precond-aor")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("precond-aor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_matrix(name: &str, m: &Matrix) -> String {
    let path = scratch(name);
    save_matrix(&path, m, MmLayout::Array).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn replay_succeeds() {
    let o = run(&["replay"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.matches("PASS").count(), 2, "{s}");
}

#[test]
fn generated_sweep_writes_csv() {
    let out = scratch("sweep.csv");
    let o = run(&[
        "sweep",
        "--gen",
        "6,0.5,m,3",
        "--instances",
        "4",
        "--precond",
        "variant=q13 alpha=1",
        "--theorems",
        "A,B",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("80 rows"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,n,variant,gamma,omega,rho_base,rho_pre,branch,verdict,skip_reason,wall_ms"
    );
    assert_eq!(lines.count(), 80);
}

#[test]
fn sweep_is_reproducible() {
    let csv = |name: &str| {
        let out = scratch(name);
        let o = run(&[
            "sweep",
            "--gen",
            "5,0.6,l-irr,9",
            "--instances",
            "3",
            "--precond",
            "variant=q4 alpha=0.5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.code() == Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(csv("r1.csv"), csv("r2.csv"));
}

#[test]
fn sweep_rejects_bad_configuration() {
    let o = run(&["sweep", "--gen", "4,0.5,m,1", "--precond", "variant=q17 alpha=0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep", "--gen", "4,0.5,m,1", "--precond", "variant=q4 alpha=1", "--omega-grid", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep", "--precond", "variant=q4 alpha=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep", "--gen", "4,0.5,q,1", "--precond", "variant=q4 alpha=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_from_file() {
    let path = write_matrix("six.mtx", &counterexample_6x6());
    let o = run(&[
        "sweep",
        "--matrix",
        &path,
        "--precond",
        "variant=q13 alpha=0.5",
        "--gamma-grid",
        "1",
        "--omega-grid",
        "0.5,1",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("2 rows"));
}

#[test]
fn classify_reports_classes() {
    let path = write_matrix("c.mtx", &Matrix::from_rows(&[[1.0, -2.0], [-2.0, 1.0]]).unwrap());
    let o = run(&["classify", "--matrix", &path]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["z_matrix: true", "l_matrix: true", "irreducible: true", "nonsingular_m: false", "jacobi_radius: 2"] {
        assert!(s.contains(line), "{s}");
    }
}

#[test]
fn radius_with_and_without_preconditioner() {
    // diagonal 2 is scaled away: Jacobi matrix [[0, 0.5], [0.5, 0]]
    let path = write_matrix("r.mtx", &Matrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap());
    let o = run(&["radius", "--matrix", &path, "--gamma", "0", "--omega", "1"]);
    assert!(o.status.success());
    let rho: f64 = stdout(&o).trim().strip_prefix("rho: ").unwrap().parse().unwrap();
    assert!((rho - 0.5).abs() < 1e-12);

    let o = run(&["radius", "--matrix", &path, "--gamma", "1", "--omega", "1", "--precond", "variant=q13 alpha=1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("rho_pre: ") && s.contains("branch: below_one"), "{s}");

    let o = run(&["radius", "--matrix", "/nonexistent.mtx", "--gamma", "1", "--omega", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
