use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifsmeasure")).args(args).output().expect("binary runs")
}

fn run_config(text: &str, args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, text).unwrap();
    let mut full = vec!["--config", path.to_str().unwrap()];
    full.extend_from_slice(args);
    run(&full)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn bowen_on_halves() {
    let out = run(&["--config", configs().join("halves.cfg").to_str().unwrap(), "bowen"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let s: f64 = value(&text, "s").parse().unwrap();
    assert!((s - 1.0).abs() < 1e-6);
    assert_eq!(value(&text, "config_sha256").len(), 64);
    assert_eq!(value(&text, "seed"), "none");
    assert_eq!(value(&text, "version"), env!("CARGO_PKG_VERSION"));
}

#[test]
fn identical_maps_are_falsified() {
    let out = run(&["--config", configs().join("twins.cfg").to_str().unwrap(), "--seed", "5", "transversality", "probe"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert_eq!(value(&text, "verdict"), "FALSIFIED");
    assert!(!value(&text, "witness_u").is_empty());
}

#[test]
fn certificate_for_pm_family() {
    let out = run(&["--config", configs().join("pm.cfg").to_str().unwrap(), "transversality", "certify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(value(&text, "verdict"), "CERTIFIED-cond1");
    assert!(text.contains("i,j,xij_lo,xij_hi,xji_lo,xji_hi,norm_i,norm_j,eta,margin1,margin2\n"));
}

#[test]
fn invalid_configs_exit_one() {
    assert_eq!(run_config("family.kind affine\n", &["bowen"]).status.code(), Some(1));
    assert_eq!(run_config("family.kind = spiral\n", &["bowen"]).status.code(), Some(1));
    assert_eq!(run_config("family.kind = affine\nfamily.ratios = 0.5\n", &["bowen"]).status.code(), Some(1));
    assert_eq!(run(&["bowen"]).status.code(), Some(1));
    assert_eq!(run(&["--config", "/nonexistent/run.cfg", "bowen"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    // stochastic commands need a seed
    let sample = "family.kind = affine\nfamily.ratios = 0.5, 0.5\nfamily.offsets = 0, 0.5\nrun.samples = 10\n";
    assert_eq!(run_config(sample, &["sample"]).status.code(), Some(1));
    assert_eq!(run_config(sample, &["sample", "--seed", "1"]).status.code(), Some(0));
}

#[test]
fn failed_audit_exits_two() {
    let out = run_config("family.kind = affine\nfamily.ratios = 1.1\nfamily.offsets = 0\n", &["audit"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(value(&stdout(&out), "verdict"), "FAIL");
}

#[test]
fn outputs_are_reproducible() {
    let cfg = "family.kind = bernoulli\npotential.kind = bernoulli\npotential.rho = 0.2\nrun.lambda = 0.6\nrun.samples = 5000\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let out = run_config(cfg, &["sample", "--seed", "11", "--threads", threads, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let x = fs::read(a.path().join("sample.csv")).unwrap();
    let y = fs::read(b.path().join("sample.csv")).unwrap();
    assert_eq!(x, y);
    assert!(x.starts_with(b"x\n") && !x.contains(&b'\r'));

    let region = "region.axis1 = 0, 0.45, 7\nregion.axis2 = 0.5, 0.7, 5\n";
    let first = run_config(region, &["region", "bernoulli", "--threads", "1"]);
    let second = run_config(region, &["region", "bernoulli", "--threads", "4"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn blackwell_region_cells() {
    let cfg = "region.axis1 = 0.45, 0.55, 3\nregion.axis2 = 0.225, 0.775, 3\nrun.depth = 8\n";
    let out = run_config(cfg, &["region", "blackwell"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip_while(|l| *l != "axis1,axis2,value,verdict")
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 9);
    let verdict = |i: usize, j: usize| rows[i * 3 + j][3];
    assert_eq!(verdict(0, 2), "SUPERCRITICAL");
    assert_eq!(verdict(2, 2), "SUPERCRITICAL");
    assert_eq!(verdict(0, 0), "SUPERCRITICAL");
    for j in 0..3 {
        assert_eq!(verdict(1, j), "DEGENERATE");
    }
    assert_eq!(verdict(0, 1), "AUDIT-FAIL");
}

#[test]
fn blackwell_full_grid_has_2500_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["region", "blackwell", "--depth", "8", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("region_blackwell.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2501);
}

#[test]
fn every_command_runs() {
    let c = |name: &str| configs().join(name).to_str().unwrap().to_string();
    let cases: Vec<(String, Vec<&str>)> = vec![
        (c("halves.cfg"), vec!["audit"]),
        (c("halves.cfg"), vec!["spectrum", "--depth", "4"]),
        (c("halves.cfg"), vec!["pressure"]),
        (c("halves.cfg"), vec!["partition"]),
        (c("halves.cfg"), vec!["pressure-drop"]),
        (c("bernoulli.cfg"), vec!["entropy"]),
        (c("bernoulli.cfg"), vec!["mprobe", "--depth", "6"]),
        (c("bernoulli.cfg"), vec!["sobolev"]),
        (c("cantor.cfg"), vec!["energy"]),
        (c("cantor.cfg"), vec!["dimcor"]),
        (c("cantor.cfg"), vec!["simdim"]),
        (c("cf.cfg"), vec!["cf", "overlap"]),
        (c("cf.cfg"), vec!["bowen"]),
        (c("blackwell.cfg"), vec!["entropy"]),
    ];
    for (cfg, args) in cases {
        let mut full = vec!["--config", cfg.as_str()];
        full.extend(args.iter());
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("# reproducibility\n"));
    }
    let out = run_config("family.kind = bernoulli\nrun.lambda = 0.6\nrun.word = 1212\n", &["project"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let x: f64 = value(&text, "x").parse().unwrap();
    assert!(x.abs() <= 1.0);
    assert!(value(&text, "error_bound").parse::<f64>().unwrap() > 0.0);
    let out = run_config("family.kind = cf\nfamily.alpha = 0.0001\nfamily.beta = 0.4142\n", &["cf", "overlap"]);
    assert_eq!(value(&stdout(&out), "overlapping"), "true");
}
