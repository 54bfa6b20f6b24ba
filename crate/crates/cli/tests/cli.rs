use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use roguewave_cli::validate::run_checks_with_fault;
use roguewave_cli::{cmd_nbeta, cmd_sweep, Cli, Command as Sub, NbetaArgs, RunArgs};

const BIN: &str = env!("CARGO_BIN_EXE_roguewave");

fn small_args(out: &Path, extra: &[&str]) -> RunArgs {
    let mut argv = vec![
        "roguewave", "sweep", "--n-waves", "64", "--n-runs", "40", "--n-beta", "20", "--seed", "7",
        "--out",
    ];
    let out = out.to_str().unwrap();
    argv.push(out);
    argv.extend_from_slice(extra);
    match Cli::try_parse_from(argv).unwrap().command {
        Sub::Sweep(a) => a,
        _ => unreachable!(),
    }
}

fn nbeta_args(out: &Path, list: &str) -> NbetaArgs {
    let argv = [
        "roguewave", "nbeta", "--n-waves", "64", "--n-runs", "40", "--seed", "7", "--rho", "0",
        "--rho", "1", "--n-beta-list", list, "--out", out.to_str().unwrap(),
    ];
    match Cli::try_parse_from(argv).unwrap().command {
        Sub::Nbeta(a) => a,
        _ => unreachable!(),
    }
}

/// File name to contents for every CSV in `dir`.
fn csvs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn names(files: &[PathBuf]) -> Vec<String> {
    let mut v: Vec<_> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn sweep_writes_the_full_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = cmd_sweep(&small_args(tmp.path(), &[]), &[]).unwrap();
    let got = names(&bundle.files);
    for rho in ["0", "0.25", "0.5", "0.75", "1"] {
        assert!(got.contains(&format!("pdf_rho_{rho}.csv")), "{got:?}");
        assert!(got.contains(&format!("mean_intensity_{rho}.csv")), "{got:?}");
    }
    for f in ["config.json", "eta_table.csv", "histogram_summary.csv", "manifest.json", "plot_pdf.py", "plot_mean_intensity.py"] {
        assert!(got.contains(&f.to_string()), "missing {f}: {got:?}");
    }
    assert!(!tmp.path().join(".roguewave.lock").exists());

    let eta = fs::read_to_string(tmp.path().join("eta_table.csv")).unwrap();
    let mut lines = eta.lines();
    assert_eq!(lines.next().unwrap(), "rho,eta,eta_base,i_max,mean,sigma");
    assert_eq!(lines.count(), 5);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 7);
    assert!(manifest["rerun"].as_array().unwrap().len() >= 4);
}

#[test]
fn bundles_are_identical_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    cmd_sweep(&small_args(a.path(), &["--threads", "1"]), &[]).unwrap();
    cmd_sweep(&small_args(b.path(), &["--threads", "4"]), &[]).unwrap();
    let (ca, cb) = (csvs(a.path()), csvs(b.path()));
    assert!(!ca.is_empty());
    assert_eq!(ca, cb);
}

#[test]
fn config_file_round_trips_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    cmd_sweep(&small_args(tmp.path(), &["--q", "5", "--no-shuffle"]), &[]).unwrap();
    let cfg_path = tmp.path().join("config.json");
    let args = RunArgs {
        config: Some(cfg_path.clone()),
        ..Default::default()
    };
    let cfg = roguewave_cli::parse_config(&args).unwrap();
    assert_eq!(cfg.n_waves, 64);
    assert_eq!(cfg.master_seed, 7);
    assert!(!cfg.shuffle);
    assert_eq!(cfg.dist, roguewave_core::PhaseDistribution::DiscreteQ { q: 5 });
    let args = RunArgs {
        config: Some(cfg_path),
        n_runs: Some(3),
        ..Default::default()
    };
    assert_eq!(roguewave_cli::parse_config(&args).unwrap().n_runs, 3);
}

#[test]
fn manifest_rerun_reproduces_the_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = Command::new(BIN)
        .args(["sweep", "--n-waves", "32", "--n-runs", "25", "--n-beta", "12", "--rho", "0", "--rho", "0.5", "--seed", "3"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let before = csvs(&out);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let rerun: Vec<String> = manifest["rerun"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(rerun[0], "roguewave");
    for f in before.keys() {
        fs::remove_file(out.join(f)).unwrap();
    }
    let status = Command::new(BIN).args(&rerun[1..]).status().unwrap();
    assert!(status.success());
    assert_eq!(csvs(&out), before);
}

#[test]
fn locked_directory_is_refused_and_left_untouched() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join(".roguewave.lock"), b"").unwrap();
    let err = cmd_sweep(&small_args(tmp.path(), &[]), &[]).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    let left: Vec<_> = fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(left.len(), 1);
}

#[test]
fn fault_hook_fails_only_the_named_check() {
    let clean = run_checks_with_fault(None);
    assert!(clean.passed, "{clean:?}");
    let names: Vec<_> = clean.checks.iter().map(|c| c.name.clone()).collect();
    for name in &names {
        let faulty = run_checks_with_fault(Some(name));
        assert!(!faulty.passed);
        for c in &faulty.checks {
            assert_eq!(c.passed, &c.name != name, "check {} under fault {name}", c.name);
        }
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        Command::new(BIN)
            .args(args)
            .env("ROGUEWAVE_OUT", tmp.path().join("env-out"))
            .output()
            .unwrap()
    };
    let bad = run(&["sweep", "--n-beta", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("n_beta"));
    assert_eq!(run(&["sweep", "--rho", "2"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--config", "/nonexistent/config.json"]).status.code(), Some(4));

    let ok = run(&["sweep", "--n-waves", "8", "--n-runs", "5", "--n-beta", "4", "--rho", "0"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(tmp.path().join("env-out").join("eta_table.csv").exists());

    let even_q = run(&["sweep", "--n-waves", "8", "--n-runs", "5", "--n-beta", "4", "--rho", "0", "--q", "4"]);
    assert_eq!(even_q.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&even_q.stderr).contains("warning"));
}

#[test]
fn validate_subcommand_reports_json() {
    let out = Command::new(BIN).arg("validate").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 7);
}

#[test]
fn single_partition_nbeta_matches_sweep_pdfs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let nb = nbeta_args(a.path(), "20");
    cmd_nbeta(&nb, &[]).unwrap();
    let mut sweep = nb.run.clone();
    sweep.n_beta = Some(20);
    sweep.out = Some(b.path().to_path_buf());
    cmd_sweep(&sweep, &[]).unwrap();
    let (ca, cb) = (csvs(a.path()), csvs(b.path()));
    for (name, bytes) in &cb {
        assert_eq!(ca.get(name), Some(bytes), "{name}");
    }
    assert!(ca.contains_key("nbeta_pdf_20.csv"));
}

#[test]
fn nbeta_study_writes_one_pdf_per_partition() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = cmd_nbeta(&nbeta_args(tmp.path(), "10,20,30"), &[]).unwrap();
    let got = names(&bundle.files);
    for n in [10, 20, 30] {
        assert!(got.contains(&format!("nbeta_pdf_{n}.csv")), "{got:?}");
    }
    let ks = fs::read_to_string(tmp.path().join("nbeta_ks.csv")).unwrap();
    assert_eq!(ks.lines().count(), 1 + 3 * 2);
}
