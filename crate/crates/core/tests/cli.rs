//! End-to-end behaviour of the `gmhd` binary and the command functions behind it.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gmhd::cli::{cmd_diag, diag_records, DIAGNOSTICS_FILE};
use gmhd::config::parse_config_str;
use gmhd::diagnostics::{DiagnosticsRecord, CSV_COLUMNS};
use gmhd::io::csv::{diagnostics_header, read_diagnostics};
use gmhd::io::snapshot::{Snapshot, SnapshotError};
use gmhd::Error;

const SMALL: &str = r#"
[grid]
n = 32
[time]
t_end = 0.05
sample_every = 2
[kernel]
family = "power_law"
alpha = 0.5
[init]
preset = "orszag_tang"
[output]
snapshots = true
"#;

fn gmhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmhd")).args(args).output().expect("spawn gmhd")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table_config(values: &[f64], radii: &[f64], override_weak: bool) -> String {
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
    SMALL.replace(
        "family = \"power_law\"\nalpha = 0.5",
        &format!(
            "family = \"tabulated\"\nradii = [{}]\nvalues = [{}]\noverride_weak = {override_weak}",
            list(radii),
            list(values)
        ),
    )
}

#[test]
fn validate_kernel_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = gmhd(&["validate-kernel", "--config", write_config(dir.path(), SMALL).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict=admissible"), "{text}");
    assert!(text.contains("doubling_constant=2"));

    let radii: Vec<f64> = (-70..=14).map(|i| (i as f64).exp2()).collect();
    let inv_log: Vec<f64> = radii.iter().map(|r| 1.0 / (std::f64::consts::E + 1.0 / r).ln()).collect();
    let cfg = write_config(dir.path(), &table_config(&inv_log, &radii, true));
    let o = gmhd(&["validate-kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict=weak_only"));
    assert!(stdout(&o).contains("dini_integral=inf"));

    let cfg = write_config(dir.path(), &table_config(&inv_log, &radii, false));
    let o = gmhd(&["validate-kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict=rejected"));

    let bumpy: Vec<f64> = radii.iter().enumerate().map(|(i, r)| if i == 40 { r * 10.0 } else { *r }).collect();
    let cfg = write_config(dir.path(), &table_config(&bumpy, &radii, true));
    let o = gmhd(&["validate-kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("monotone_ok=false"));
}

#[test]
fn symbol_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = gmhd(&["symbol", "--config", cfg.to_str().unwrap(), "--kappa-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "kappa,sigma\n0,0\n");

    let cfg = write_config(dir.path(), &SMALL.replace("alpha = 0.5", "alpha = 0.3"));
    let o = gmhd(&["symbol", "--config", cfg.to_str().unwrap(), "--kappa-max", "4"]);
    let rows: Vec<(f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let (k, s) = l.split_once(',').unwrap();
            (k.parse().unwrap(), s.parse().unwrap())
        })
        .collect();
    let at = |k: f64| rows.iter().find(|r| r.0 == k).unwrap().1;
    assert!((at(2.0) / at(1.0) - 2f64.powf(0.6)).abs() < 1e-6);
    assert!((at(4.0) / at(2.0) - 2f64.powf(0.6)).abs() < 1e-6);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
}

#[test]
fn zero_horizon_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("t_end = 0.05", "t_end = 0.0"));
    let out = dir.path().join("out");
    let o = gmhd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("steps=0"));
    let csv = fs::read_to_string(out.join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(csv, format!("{}\n", diagnostics_header()));
    assert_eq!(diagnostics_header().split(',').count(), CSV_COLUMNS.len());
}

#[test]
fn bad_configs_exit_with_error() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        SMALL.replace("n = 32", "n = 33"),
        SMALL.replace("alpha = 0.5", "alpha = 0.5\nbeta = 1.0"),
        "not toml at all [".to_string(),
    ] {
        let cfg = write_config(dir.path(), &text);
        let o = gmhd(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    let o = gmhd(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overflowing_initial_data_reports_blowup() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace("preset = \"orszag_tang\"", "preset = \"random_band\"\namplitude = 1e300\nseed = 3")
        .replace("snapshots = true", "snapshots = false");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let o = gmhd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("blowup=true"));
    assert!(out.join(DIAGNOSTICS_FILE).exists());
}

fn run_with_snapshots(dir: &Path, text: &str) -> (PathBuf, Vec<PathBuf>) {
    let cfg = write_config(dir, text);
    let out = dir.join("out");
    let o = gmhd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut snaps: Vec<PathBuf> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bin"))
        .collect();
    snaps.sort();
    (out, snaps)
}

fn diag_reproduces(text: &str) {
    let dir = tempfile::tempdir().unwrap();
    let (out, snaps) = run_with_snapshots(dir.path(), text);
    let run = read_diagnostics(fs::read(out.join(DIAGNOSTICS_FILE)).unwrap().as_slice()).unwrap();
    assert_eq!(run.len(), snaps.len());
    for p in &snaps {
        assert_eq!(fs::metadata(p).unwrap().len() as usize, Snapshot::file_len(parse_config_str(text).unwrap().grid.n));
    }

    let mut args = vec![
        "diag".to_string(),
        "--config".into(),
        dir.path().join("run.toml").to_string_lossy().into(),
        "--out".into(),
    ];
    args.push(dir.path().join("diag").to_string_lossy().into());
    args.extend(snaps.iter().map(|p| p.to_string_lossy().into_owned()));
    let o = Command::new(env!("CARGO_BIN_EXE_gmhd")).args(&args).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let re = read_diagnostics(fs::read(dir.path().join("diag").join(DIAGNOSTICS_FILE)).unwrap().as_slice()).unwrap();
    assert_eq!(re.len(), run.len());

    for (a, b) in run.iter().zip(&re) {
        for ((name, x), y) in CSV_COLUMNS.iter().zip(a.values()).zip(b.values()) {
            let tol = 1e-12 * x.abs().max(1.0);
            assert!((x - y).abs() <= tol, "{name} at t={}: {x} vs {y}", a.t);
        }
    }
}

#[test]
fn diag_reproduces_the_run() {
    diag_reproduces(SMALL);
}

#[test]
fn diag_reproduces_a_cfl_limited_run() {
    // about 14 steps of dt ≈ 0.0036, below dt_max
    let text = SMALL
        .replace("n = 32", "n = 64")
        .replace(
            "preset = \"orszag_tang\"",
            "preset = \"random_band\"\namplitude = 40.0\nk_min = 1.0\nk_max = 3.0\nseed = 11",
        )
        .replace("t_end = 0.05\nsample_every = 2", "t_end = 0.05\nsample_every = 3");
    diag_reproduces(&text);
}

#[test]
fn diag_rejects_damaged_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let (_, snaps) = run_with_snapshots(dir.path(), SMALL);
    let cfg = parse_config_str(SMALL).unwrap();
    let bytes = fs::read(&snaps[0]).unwrap();
    let cut = dir.path().join("cut.bin");
    fs::write(&cut, &bytes[..bytes.len() - 8]).unwrap();
    let err = cmd_diag(&cfg, &[cut], &mut Vec::new()).unwrap_err();
    assert!(matches!(err, Error::Snapshot(SnapshotError::Corrupt(_))), "{err}");

    let wrong_n = parse_config_str(&SMALL.replace("n = 32", "n = 64")).unwrap();
    assert!(matches!(cmd_diag(&wrong_n, &snaps[..1], &mut Vec::new()), Err(Error::Usage(_))));
    let backwards = [snaps[1].clone(), snaps[0].clone()];
    assert!(matches!(cmd_diag(&cfg, &backwards, &mut Vec::new()), Err(Error::Usage(_))));
}

#[test]
fn zero_snapshot_gives_zero_record() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("zero.bin");
    Snapshot { n: 32, t: 1.5, omega: vec![0.0; 1024], j: vec![0.0; 1024] }.write(&p).unwrap();
    let cfg = parse_config_str(SMALL).unwrap();
    let recs = diag_records(&cfg, &[p]).unwrap();
    assert_eq!(recs, vec![DiagnosticsRecord { t: 1.5, ..Default::default() }]);
}
