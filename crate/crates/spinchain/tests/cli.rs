//! End-to-end tests of the `spinchain` binary: output files and their
//! formats, byte determinism, worker-count independence, line-numbered
//! config diagnostics, and the exit-code contract (0 success, 1 config
//! error, 2 numerical failure).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_spinchain");

const SWEEP_CFG: &str = "\
[model]
n_sites = 3
kind = ising
alpha3 = 1.0

[dissipator]
kind = local
rate = 1.0

[sweep]
start = 0.2
stop = 2.6
points = 41
gammas = 1e-3, 1e-4
delta_b = 1e-3

[output]
outputs = jx, jz, spectrum, infidelity, crossings, cnorms
";

const PARAM_CFG: &str = "\
[lambda]
omega1 = 0.4
omega2 = 0.5
delta_re = 20.0
omega_re = 2.0
gamma_eg = 1.0
gamma_er = 0.6
delta_gr = 1.3
eta1 = 0.1
nu = 1.0

[raman]
omega_a = 0.3
omega_b = 0.2
eta_b = 0.05
delta_e = 15.0

[hubbard]
t0 = 0.05
t1 = 0.04
u00 = 1.0
u11 = 1.1
u01 = 0.9
";

fn run(args: &[&str], workers: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("SPINCHAIN_WORKERS", workers)
        .output()
        .expect("binary spawns")
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// 1-based line of the first config line starting with `needle`.
fn line_of(text: &str, needle: &str) -> usize {
    1 + text
        .lines()
        .position(|l| l.starts_with(needle))
        .expect("needle present")
}

/// Parsed CSV body: header plus one Vec<String> per data row.
fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn sweep_outputs_are_deterministic_and_worker_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "run.cfg", SWEEP_CFG);
    let outs = [
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    ];
    for (dir, workers) in outs.iter().zip(["1", "1", "3"]) {
        let out = run(
            &["sweep", &cfg, "--out-dir", dir.to_str().unwrap()],
            workers,
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    // Re-runs and different worker counts give byte-identical files.
    for name in [
        "sweep.csv",
        "spectrum.csv",
        "infidelity.csv",
        "crossings.json",
    ] {
        let reference = fs::read(outs[0].join(name)).unwrap();
        assert!(!reference.is_empty(), "{name} written");
        for dir in &outs[1..] {
            assert_eq!(
                reference,
                fs::read(dir.join(name)).unwrap(),
                "{name} differs"
            );
        }
    }

    let (header, rows) = read_csv(&outs[0].join("sweep.csv"));
    assert_eq!(header, "b_x,gamma,jx,jz,kernel_dim,residual");
    assert_eq!(rows.len(), 2 * 41);
    for row in &rows {
        assert_eq!(row.len(), 6);
        let gamma: f64 = row[1].parse().unwrap();
        assert!(gamma == 1e-3 || gamma == 1e-4);
        // Collective-spin bound on the reported observables.
        for v in [&row[2], &row[3]] {
            let v: f64 = v.parse().unwrap();
            assert!(v.abs() <= 3.0 + 1e-9, "observable {v} out of bound");
        }
        assert_eq!(row[4], "1");
        assert!(row[5].parse::<f64>().unwrap() < 1e-8);
        // 17 significant digits: values survive a parse round trip.
        for field in [&row[0], &row[1], &row[2], &row[3], &row[5]] {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), **field);
        }
    }

    let (header, rows) = read_csv(&outs[0].join("spectrum.csv"));
    assert_eq!(header, "b_x,branch,eigenvalue");
    assert_eq!(rows.len(), 41 * 8);
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[7][1], "7");

    let (header, rows) = read_csv(&outs[0].join("infidelity.csv"));
    assert_eq!(header, "b_x,infidelity");
    assert_eq!(rows.len(), 41);
    for row in &rows {
        let v: f64 = row[1].parse().unwrap();
        assert!(v > -1e-12 && v < 1.0);
    }

    let json = fs::read_to_string(outs[0].join("crossings.json")).unwrap();
    let reports: Vec<Value> = serde_json::from_str(&json).unwrap();
    assert!(!reports.is_empty(), "Ising sweep window contains crossings");
    for r in &reports {
        let x0 = r["x0"].as_f64().unwrap();
        assert!((0.2..=2.6).contains(&x0));
        assert!(r["pair"].as_array().unwrap().len() == 2);
        // cnorms was requested, so conditions are evaluated.
        assert!(r["c_norm"].as_f64().is_some());
        assert!(r["condition_met"].as_bool().is_some());
    }
}

#[test]
fn spectrum_subcommand_writes_only_the_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "run.cfg", SWEEP_CFG);
    let dir = tmp.path().join("out");
    let out = run(&["spectrum", &cfg, "--out-dir", dir.to_str().unwrap()], "1");
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.join("spectrum.csv").exists());
    for absent in ["sweep.csv", "infidelity.csv", "crossings.json"] {
        assert!(!dir.join(absent).exists(), "{absent} written by spectrum");
    }
}

#[test]
fn crossings_subcommand_skips_conditions_inside_a_sector() {
    // Condition evaluation needs the full space, so a sector run reports
    // crossings with the condition fields left empty.
    let cfg_text = "\
[model]
n_sites = 4
kind = ising
alpha3 = 1.0
boundary = periodic

[dissipator]
kind = collective
rate = 1.0

[sweep]
start = 0.2
stop = 2.6
points = 41
gammas = 1e-3

[sector]
translation = 1
reflection = 1
";
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "run.cfg", cfg_text);
    let dir = tmp.path().join("out");
    let out = run(
        &["crossings", &cfg, "--out-dir", dir.to_str().unwrap()],
        "1",
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json = fs::read_to_string(dir.join("crossings.json")).unwrap();
    let reports: Vec<Value> = serde_json::from_str(&json).unwrap();
    assert!(!reports.is_empty());
    for r in &reports {
        assert!(r["c_norm"].is_null());
        assert!(r["condition_met"].is_null());
    }
}

#[test]
fn config_errors_point_at_the_offending_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &str, &str); 4] = [
        (
            "kind = ising",
            "kind = tfim",
            "kind = tfim",
            "unknown model kind",
        ),
        (
            "points = 41",
            "points = 1",
            "points = 1",
            "at least 2 points",
        ),
        ("rate = 1.0", "charge = 1.0", "charge = 1.0", "unknown key"),
        (
            "outputs = jx, jz, spectrum, infidelity, crossings, cnorms",
            "outputs = jy",
            "outputs = jy",
            "unknown output",
        ),
    ];
    for (from, to, at, msg) in cases {
        let text = SWEEP_CFG.replace(from, to);
        let cfg = write_cfg(tmp.path(), "bad.cfg", &text);
        let out = run(&["sweep", &cfg], "1");
        assert_eq!(out.status.code(), Some(1), "{to}");
        let err = stderr_of(&out);
        let line = line_of(&text, at);
        assert!(err.contains(&format!("at line {line}")), "{to}: {err}");
        assert!(err.contains(msg), "{to}: {err}");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();

    // 0: help text.
    let out = run(&["--help"], "1");
    assert_eq!(out.status.code(), Some(0));

    // 1: unreadable config path.
    let out = run(&["sweep", "/nonexistent/run.cfg"], "1");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("cannot read"));

    // 1: unknown subcommand.
    let out = run(&["simulate"], "1");
    assert_eq!(out.status.code(), Some(1));

    // 1: malformed worker count.
    let cfg = write_cfg(tmp.path(), "run.cfg", SWEEP_CFG);
    let dir = tmp.path().join("out");
    let out = run(&["sweep", &cfg, "--out-dir", dir.to_str().unwrap()], "zero");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("SPINCHAIN_WORKERS"));

    // 2: numerical failure. A zero-coupling chain is degenerate at every
    // field value, so the one-sided limits at a detected crossing cannot
    // be resolved and condition evaluation must fail.
    let degen = "\
[model]
n_sites = 2
kind = heisenberg
alpha = 0.0

[dissipator]
kind = local
rate = 1e-4

[sweep]
start = 0.1
stop = 1.0
points = 21
gammas = 1.0

[output]
outputs = cnorms
";
    let cfg = write_cfg(tmp.path(), "degen.cfg", degen);
    let dir = tmp.path().join("degen_out");
    let out = run(
        &["crossings", &cfg, "--out-dir", dir.to_str().unwrap()],
        "1",
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("numerical failure"));
}

#[test]
fn params_prints_effective_parameters_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "params.cfg", PARAM_CFG);
    let out = run(&["params", &cfg], "1");
    assert!(out.status.success(), "{}", stderr_of(&out));
    let eff: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "omega_eff",
        "delta_r",
        "big_gamma",
        "small_gamma",
        "a_plus",
        "a_minus",
        "b_x",
        "alpha1",
        "alpha2",
        "b_z",
        "nu_tilde",
    ] {
        assert!(eff[key].is_f64(), "missing field {key}");
    }
    // Decay asymmetry: emission into the lower dressed state dominates.
    assert!(eff["a_minus"].as_f64().unwrap() > 0.0);
    assert!(eff["a_plus"].as_f64().unwrap() >= 0.0);
    // The Raman section drives the transverse field.
    assert!(eff["b_x"].as_f64().unwrap() != 0.0);
    assert!(!eff["validity"].as_array().unwrap().is_empty());

    let again = run(&["params", &cfg], "1");
    assert_eq!(out.stdout, again.stdout, "params output not deterministic");

    // Without the optional sections the spin-model entries are inert.
    let text = PARAM_CFG.split("\n[raman]").next().unwrap().to_string();
    let cfg = write_cfg(tmp.path(), "lambda_only.cfg", &text);
    let out = run(&["params", &cfg], "1");
    assert!(out.status.success(), "{}", stderr_of(&out));
    let eff: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eff["b_x"].as_f64().unwrap(), 0.0);
    assert_eq!(eff["alpha1"].as_f64().unwrap(), 0.0);
}

#[test]
fn check_prints_the_validity_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "params.cfg", PARAM_CFG);
    let out = run(&["check", &cfg], "1");
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.pop().unwrap();
    assert!(last.starts_with("result: "), "{last}");
    assert!(last.ends_with("conditions satisfied"), "{last}");
    let conditions: Vec<&&str> = lines
        .iter()
        .filter(|l| !l.starts_with("warning:"))
        .collect();
    assert!(!conditions.is_empty());
    for line in conditions {
        assert!(
            line.contains(": satisfied") || line.contains(": violated"),
            "{line}"
        );
        assert!(
            line.contains("lhs = ") && line.contains("margin = "),
            "{line}"
        );
    }
}
