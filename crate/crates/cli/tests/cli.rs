use std::path::PathBuf;
use std::process::{Command, Output};

fn rairy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rairy")).args(args).env_remove("RAIRY_OUT_DIR").output().unwrap()
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("rairy-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn tw_table_is_a_cdf() {
    let out = rairy(&["tw", "--x-min", "-6", "--x-max", "4", "--step", "0.1"]);
    assert!(out.status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 101);
    let f: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(f.windows(2).all(|w| w[1] >= w[0]));
    assert!(rows.iter().all(|r| r[4].abs() < 1e-7));
}

#[test]
fn geometry_unit_rho0_gives_half() {
    let out = rairy(&["geometry", "--rho0", "1", "--n", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("tangency")).unwrap();
    let t0: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(t0, 0.5);
}

#[test]
fn metadata_echoes_configuration() {
    let out = rairy(&["rairy", "--r", "2", "--tau", "-1", "--x-min", "0", "--x-max", "0.5", "--step", "0.25"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# config: Rairy(RairyArgs { r: 2, tau: -1.0"));
    assert_eq!(rows(&Output { stdout: text.into_bytes(), ..out }).len(), 3);
}

#[test]
fn fast_verification_is_deterministic() {
    let dir = scratch_dir("verify");
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for p in [&a, &b] {
        let out = rairy(&["verify-all", "--fast", "--only", "1,8,11,12", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "--n", "50", "--samples", "200", "--seed", "11", "--law", "tw", "--rho", "0.5"];
    let (a, b) = (rairy(&args), rairy(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(rows(&a).len(), 200);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rairy(&["mc", "--n", "50"]).status.code(), Some(2));
    assert_eq!(rairy(&["rairy", "--tau", "1"]).status.code(), Some(2));
    assert_eq!(rairy(&["verify-all", "--only", "13"]).status.code(), Some(2));
    assert_eq!(rairy(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let out = rairy(&["virasoro-check", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch_dir("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# tw range\nx_min = 0\nx_max = 1\nstep = 0.5\n").unwrap();
    let out = rairy(&["--config", cfg.to_str().unwrap(), "tw"]);
    assert_eq!(rows(&out).len(), 3);
    let out = rairy(&["--config", cfg.to_str().unwrap(), "tw", "--step", "0.25"]);
    assert_eq!(rows(&out).len(), 5);
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch_dir("env");
    let out = Command::new(env!("CARGO_BIN_EXE_rairy"))
        .args(["geometry"])
        .env("RAIRY_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.join("geometry.csv")).unwrap();
    assert!(text.contains("tangency,"));
}
