use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use geophase::experiment::table::TIMESTAMP_KEY;
use geophase::experiment::ResultTable;
use tempfile::TempDir;

fn geophase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geophase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn load(path: &Path) -> ResultTable {
    ResultTable::from_csv_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eq14_check_with_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "triples.toml", "kind = \"eq14_check\"\n[eq14_check]\ntriples = 1000\n");
    let csv = dir.path().join("triples.csv");
    let out = geophase(&["eq14-check", "--config", &cfg, "--seed", "7", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let table = load(&csv);
    assert_eq!(table.rows.len(), 1000);
    let worst = table.column("deviation").unwrap().into_iter().fold(0.0, f64::max);
    assert!(worst < 1e-9, "max deviation {worst}");
    assert!(table.metadata.iter().any(|(k, v)| k == "seed" && v == "7"));
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.toml", "kind = \"eraser\"\n[eraser]\nrandom = 20\n");
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = geophase(&["eraser", "--config", &cfg, "--seed", seed, "--out", path.to_str().unwrap(), "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(out.stdout.is_empty());
        load(&path)
    };
    let (a, b, c) = (run("a.csv", "11"), run("b.csv", "11"), run("c.csv", "12"));
    assert_eq!(a.deterministic_body(), b.deterministic_body());
    assert_ne!(a.deterministic_body(), c.deterministic_body());
    assert!(a.metadata.iter().any(|(k, _)| k == TIMESTAMP_KEY));
}

#[test]
fn csv_reload_is_exact() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.toml", "kind = \"eraser\"\nseed = 5\n[eraser]\nrandom = 10\n");
    let path = dir.path().join("e.csv");
    let out = geophase(&["eraser", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let table = ResultTable::from_csv_str(&text).unwrap();
    assert_eq!(table.to_csv_string(), text);
    assert_eq!(table.rows.len(), 10);
    assert!(String::from_utf8_lossy(&out.stdout).contains("wrote"));
}

#[test]
fn sweep_hits_the_quarter_point() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        "kind = \"theta2_sweep\"\n[theta2_sweep]\nthetas = [{FRAC_PI_4:?}]\ng = 1.0\np_values = [-0.5, 0.0, {FRAC_PI_4:?}, 1.0]\n"
    );
    let cfg = write_config(&dir, "s.toml", &body);
    let path = dir.path().join("s.csv");
    let out = geophase(&["theta2-sweep", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = load(&path);
    let ps = table.column("p").unwrap();
    let phases = table.column("theta2").unwrap();
    let k = ps.iter().position(|&p| p == FRAC_PI_4).unwrap();
    assert!((phases[k] + FRAC_PI_4).abs() < 1e-9);
    assert_eq!(ps.len(), 4);
}

#[test]
fn weak_run_matches_prediction() {
    let dir = TempDir::new().unwrap();
    let body = format!("kind = \"weak\"\n[weak]\ntheta = {FRAC_PI_4:?}\ncouplings = [0.05]\ndelta_ps = [0.1]\n");
    let cfg = write_config(&dir, "w.toml", &body);
    let path = dir.path().join("w.csv");
    let out = geophase(&["weak", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = load(&path);
    let sim = table.column("dx_simulated").unwrap()[0];
    assert!((sim - 0.05).abs() <= 0.01 * 0.05, "dx = {sim}");
    assert!((table.column("dx_analytic").unwrap()[0] - 0.05).abs() < 1e-12);
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let out = geophase(&["eq14-check", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let table = ResultTable::from_csv_str(&text).unwrap();
    assert!(!table.rows.is_empty());
}

#[test]
fn validate_accepts_good_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ok.toml", "kind = \"weak\"\n[weak]\ntheta = 0.5\ncouplings = [0.05]\ndelta_ps = [0.1]\n");
    let out = geophase(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

#[test]
fn validate_reports_bad_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "grid.toml",
        "kind = \"weak\"\n[weak]\ntheta = 0.5\ncouplings = [0.05]\ndelta_ps = [0.1]\ngrid_points = 300\n",
    );
    let out = geophase(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with("error: kind=config field=weak.grid_points message="));
}

#[test]
fn validate_reports_orthogonal_selection() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "orth.toml",
        "kind = \"weak\"\n[weak]\npsi_i = { polar = 0.0, azimuth = 0.0 }\npsi_f = { amplitudes = [[0.0, 0.0], [1.0, 0.0]] }\nobservable = \"sigma_x\"\ncouplings = [0.05]\ndelta_ps = [0.1]\n",
    );
    let out = geophase(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("field=weak.psi_f"));
    assert!(err.contains("weak value diverges"));

    // Running it fails the same way before any work is done.
    let run = geophase(&["weak", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.toml", "kind = \"weak\"\n[weak]\nhbar = \"one\"\n");
    let out = geophase(&["weak", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: kind=config field=weak.hbar"));
}

#[test]
fn coarse_grid_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let body = format!("kind = \"weak\"\n[weak]\ntheta = {:?}\ncouplings = [500.0]\ndelta_ps = [1.0]\n", PI / 8.0);
    let cfg = write_config(&dir, "coarse.toml", &body);
    let path = dir.path().join("never.csv");
    let out = geophase(&["weak", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.starts_with("error: kind=domain code=grid_too_coarse "), "{err}");
    assert!(!path.exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    let out = geophase(&["eq14-check", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: kind=io"));
}
