//! Command-line batch driver: declarative configs in, CSV/JSON data
//! files out.
//!
//! Subcommands: `sweep` (every output requested by the config),
//! `spectrum` (eigenvalue branches only), `crossings` (degeneracy
//! reports with condition evaluation), `params` (cold-atom effective
//! parameters as JSON), and `check` (parameter validity report).
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.
//!
//! Output files are byte-deterministic for a fixed config and build:
//! grid points are dispatched to a worker pool (size taken from
//! `SPINCHAIN_WORKERS`, default available parallelism) and reassembled
//! in grid order, and floats are printed with 17 significant digits.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::coldatom::{
    effective_params, eta1_from_wavenumber, EffectiveParams, HubbardParams, LambdaSystemParams,
    RamanFieldParams,
};
use crate::config::{ConfigFile, Section};
use crate::degeneracy::{
    evaluate_conditions, find_crossings, find_crossings_with, sweep_spectrum, sweep_spectrum_with,
    SpectrumBranches,
};
use crate::error::{Error, Result};
use crate::linalg::{cr, linspace};
use crate::liouvillian::build_liouvillian;
use crate::models::{
    build_hamiltonian, build_jump_operators, Boundary, DissipatorSpec, Model, ModelSpec,
};
use crate::spin_ops::{collective, Axis, DenseOperator};
use crate::steadystate::{expectation_real, infidelity_pair, steady_state};
use crate::symmetry::{
    compress, compress_jumps, sector_isometry, symmetry_op, SectorIsometry, SymmetryKind,
};

#[derive(Parser)]
#[command(
    name = "spinchain",
    version,
    about = "Dissipative spin-chain batch driver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file and write its outputs.
    Sweep {
        config: PathBuf,
        /// Override the output directory from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write only the tracked spectrum (spectrum.csv).
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write only the crossing reports (crossings.json), with
    /// conditions evaluated on full-space runs.
    Crossings {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compute cold-atom effective parameters and print them as JSON.
    Params { paramfile: PathBuf },
    /// Validate a parameter file and print its validity report.
    Check { paramfile: PathBuf },
}

/// Entry point used by the binary and by integration tests. The first
/// argument is the program name, as in `std::env::args_os`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sweep { config, out_dir } => {
            load_sweep_plan(&config, out_dir).and_then(|plan| run_outputs(&plan))
        }
        Command::Spectrum { config, out_dir } => {
            load_sweep_plan(&config, out_dir).and_then(|mut plan| {
                plan.outputs = Outputs {
                    spectrum: true,
                    ..Outputs::default()
                };
                run_outputs(&plan)
            })
        }
        Command::Crossings { config, out_dir } => {
            load_sweep_plan(&config, out_dir).and_then(|mut plan| {
                plan.outputs = Outputs {
                    crossings: true,
                    cnorms: plan.sector.is_none(),
                    ..Outputs::default()
                };
                run_outputs(&plan)
            })
        }
        Command::Params { paramfile } => load_param_file(&paramfile).and_then(|p| cmd_params(&p)),
        Command::Check { paramfile } => load_param_file(&paramfile).and_then(|p| cmd_check(&p)),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for configuration problems, 2 for numerical failures.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::DimensionMismatch(_)
        | Error::BasisMismatch(_, _)
        | Error::Config { .. }
        | Error::Io(_) => 1,
        Error::Numerical(_) | Error::Lapack(_) => 2,
    }
}

/// Requested output files.
#[derive(Clone, Copy, Debug, Default)]
struct Outputs {
    jx: bool,
    jz: bool,
    spectrum: bool,
    infidelity: bool,
    crossings: bool,
    cnorms: bool,
}

/// Fully validated sweep description.
#[derive(Debug)]
struct SweepPlan {
    spec: ModelSpec,
    diss: DissipatorSpec,
    grid: Vec<f64>,
    gammas: Vec<f64>,
    sector: Option<SectorIsometry>,
    outputs: Outputs,
    delta_b: Option<f64>,
    out_dir: PathBuf,
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read `{}`: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn entry_err(section: &Section, key: &str, msg: impl std::fmt::Display) -> Error {
    let line = section.get(key).map_or(section.line(), |e| e.line);
    Error::config_at(line, msg.to_string())
}

fn load_model(cfg: &ConfigFile) -> Result<ModelSpec> {
    let m = cfg.require_section("model")?;
    m.check_keys(&[
        "n_sites", "kind", "alpha", "alpha1", "alpha2", "alpha3", "boundary", "b_z", "nu_tilde",
    ])?;
    let n_sites = m.usize("n_sites")?;
    let kind = m.str("kind")?;
    let model = match kind {
        "ising" => Model::Ising {
            alpha3: m.f64("alpha3")?,
        },
        "xxz" => Model::Xxz {
            alpha1: m.f64("alpha1")?,
            alpha2: m.f64("alpha2")?,
        },
        "heisenberg" => Model::Heisenberg {
            alpha: m.f64("alpha")?,
        },
        other => {
            return Err(entry_err(
                m,
                "kind",
                format!("unknown model kind `{other}`; expected ising, xxz, or heisenberg"),
            ))
        }
    };
    let boundary = match m.str_or("boundary", "open") {
        "open" => Boundary::Open,
        "periodic" => Boundary::Periodic,
        other => {
            return Err(entry_err(
                m,
                "boundary",
                format!("unknown boundary `{other}`; expected open or periodic"),
            ))
        }
    };
    let spec = ModelSpec {
        n_sites,
        model,
        boundary,
        b_x: 0.0,
        b_z: m.f64_or("b_z", 0.0)?,
        nu_tilde: m.f64_or("nu_tilde", 0.0)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn load_dissipator(cfg: &ConfigFile, n_sites: usize) -> Result<DissipatorSpec> {
    let d = cfg.require_section("dissipator")?;
    d.check_keys(&["kind", "rate", "rates", "a_minus", "a_plus"])?;
    let diss = match d.str("kind")? {
        "local" => {
            if d.get("rates").is_some() && d.get("rate").is_some() {
                return Err(entry_err(
                    d,
                    "rates",
                    "give either `rate` (uniform) or `rates` (per site), not both",
                ));
            }
            if d.get("rates").is_some() {
                DissipatorSpec::Local {
                    rates: d.f64_list("rates")?,
                }
            } else {
                DissipatorSpec::uniform_local(d.f64("rate")?, n_sites)
            }
        }
        "collective" => DissipatorSpec::Collective {
            rate: d.f64("rate")?,
        },
        "local_heating" => DissipatorSpec::LocalWithHeating {
            a_minus: d.f64("a_minus")?,
            a_plus: d.f64("a_plus")?,
        },
        other => {
            return Err(entry_err(
                d,
                "kind",
                format!(
                    "unknown dissipator kind `{other}`; expected local, collective, \
                     or local_heating"
                ),
            ))
        }
    };
    // Validate rates and counts up front so mistakes surface as config
    // errors rather than mid-run failures.
    build_jump_operators(&diss, n_sites)?;
    Ok(diss)
}

fn load_sector(cfg: &ConfigFile, n_sites: usize) -> Result<Option<SectorIsometry>> {
    let Some(sec) = cfg.section("sector") else {
        return Ok(None);
    };
    sec.check_keys(&["translation", "reflection"])?;
    let mut generators = Vec::new();
    for (key, kind) in [
        ("translation", SymmetryKind::Translation),
        ("reflection", SymmetryKind::Reflection),
    ] {
        if sec.get(key).is_some() {
            let eig = sec.i64(key)?;
            if eig != 1 && eig != -1 {
                return Err(entry_err(
                    sec,
                    key,
                    format!("sector eigenvalue must be 1 or -1, got {eig}"),
                ));
            }
            generators.push((symmetry_op(kind, n_sites)?, cr(eig as f64)));
        }
    }
    if generators.is_empty() {
        return Err(Error::config_at(
            sec.line(),
            "[sector] needs `translation` and/or `reflection`",
        ));
    }
    Ok(Some(sector_isometry(&generators, n_sites)?))
}

fn load_outputs(cfg: &ConfigFile) -> Result<(Outputs, PathBuf)> {
    let mut out = Outputs {
        jx: true,
        jz: true,
        ..Outputs::default()
    };
    let mut dir = PathBuf::from(".");
    if let Some(o) = cfg.section("output") {
        o.check_keys(&["dir", "outputs"])?;
        dir = PathBuf::from(o.str_or("dir", "."));
        if o.get("outputs").is_some() {
            out = Outputs::default();
            for item in o.str_list("outputs")? {
                match item.as_str() {
                    "jx" => out.jx = true,
                    "jz" => out.jz = true,
                    "spectrum" => out.spectrum = true,
                    "infidelity" => out.infidelity = true,
                    "crossings" => out.crossings = true,
                    "cnorms" => out.cnorms = true,
                    other => {
                        return Err(entry_err(
                            o,
                            "outputs",
                            format!(
                                "unknown output `{other}`; expected jx, jz, spectrum, \
                                 infidelity, crossings, cnorms"
                            ),
                        ))
                    }
                }
            }
        }
    }
    Ok((out, dir))
}

fn load_sweep_plan(path: &Path, out_dir_flag: Option<PathBuf>) -> Result<SweepPlan> {
    let cfg = read_config(path)?;
    cfg.check_sections(&["model", "dissipator", "sweep", "sector", "output"])?;
    let spec = load_model(&cfg)?;
    let diss = load_dissipator(&cfg, spec.n_sites)?;
    let s = cfg.require_section("sweep")?;
    s.check_keys(&["parameter", "start", "stop", "points", "gammas", "delta_b"])?;
    let parameter = s.str_or("parameter", "b_x");
    if parameter != "b_x" {
        return Err(entry_err(
            s,
            "parameter",
            format!("only `b_x` sweeps are supported, got `{parameter}`"),
        ));
    }
    let (start, stop) = (s.f64("start")?, s.f64("stop")?);
    let points = s.usize("points")?;
    if points < 2 {
        return Err(entry_err(s, "points", "a sweep needs at least 2 points"));
    }
    if !(start < stop) {
        return Err(entry_err(
            s,
            "start",
            format!("sweep needs start < stop, got {start} and {stop}"),
        ));
    }
    let gammas = s.f64_list("gammas")?;
    if gammas.is_empty() || gammas.iter().any(|&g| !(g > 0.0)) {
        return Err(entry_err(
            s,
            "gammas",
            "gammas must be a nonempty list of positive scale factors",
        ));
    }
    let step = (stop - start) / (points - 1) as f64;
    let delta_b = match s.get("delta_b") {
        Some(_) => {
            let v = s.f64("delta_b")?;
            if !(v > 0.0 && v < step) {
                return Err(entry_err(
                    s,
                    "delta_b",
                    format!("delta_b must satisfy 0 < delta_b < grid step ({step:.3e}), got {v}"),
                ));
            }
            Some(v)
        }
        None => None,
    };
    let sector = load_sector(&cfg, spec.n_sites)?;
    let (outputs, cfg_dir) = load_outputs(&cfg)?;
    if outputs.infidelity && delta_b.is_none() {
        return Err(Error::config(
            "infidelity output requires `delta_b` in [sweep]",
        ));
    }
    if sector.is_some() && (outputs.infidelity || outputs.cnorms) {
        return Err(Error::config(
            "infidelity and cnorms outputs need a full-space run, not a sector",
        ));
    }
    Ok(SweepPlan {
        grid: linspace(start, stop, points),
        spec,
        diss,
        gammas,
        sector,
        outputs,
        delta_b,
        out_dir: out_dir_flag.unwrap_or(cfg_dir),
    })
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let workers = match std::env::var("SPINCHAIN_WORKERS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&w| w >= 1).ok_or_else(|| {
            Error::config(format!(
                "SPINCHAIN_WORKERS must be a positive integer, got `{v}`"
            ))
        })?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Hamiltonian at one grid point, compressed when a sector is active.
fn point_hamiltonian(plan: &SweepPlan, b_x: f64) -> Result<DenseOperator> {
    let h = build_hamiltonian(&plan.spec.with_b_x(b_x))?;
    match &plan.sector {
        Some(iso) => compress(&h, iso),
        None => Ok(h),
    }
}

fn run_outputs(plan: &SweepPlan) -> Result<()> {
    let pool = worker_pool()?;
    if plan.outputs.jx || plan.outputs.jz {
        let csv = sweep_csv(plan, &pool)?;
        write_file(&plan.out_dir, "sweep.csv", &csv)?;
    }
    if plan.outputs.spectrum {
        let csv = spectrum_csv(&branches(plan)?);
        write_file(&plan.out_dir, "spectrum.csv", &csv)?;
    }
    if plan.outputs.infidelity {
        let csv = infidelity_csv(plan, &pool)?;
        write_file(&plan.out_dir, "infidelity.csv", &csv)?;
    }
    if plan.outputs.crossings || plan.outputs.cnorms {
        let json = crossings_json(plan)?;
        write_file(&plan.out_dir, "crossings.json", &json)?;
    }
    Ok(())
}

fn sweep_csv(plan: &SweepPlan, pool: &rayon::ThreadPool) -> Result<String> {
    let n = plan.spec.n_sites;
    let mut jx_op = collective(Axis::X, n)?;
    let mut jz_op = collective(Axis::Z, n)?;
    if let Some(iso) = &plan.sector {
        jx_op = compress(&jx_op, iso)?;
        jz_op = compress(&jz_op, iso)?;
    }
    let bound = n as f64 + 1e-9;
    let mut out = String::from("b_x,gamma,jx,jz,kernel_dim,residual\n");
    for &gamma in &plan.gammas {
        let mut jumps = build_jump_operators(&plan.diss.scaled(gamma), n)?;
        if let Some(iso) = &plan.sector {
            jumps = compress_jumps(&jumps, iso)?;
        }
        let rows: Vec<(f64, f64, f64, usize, f64)> = pool.install(|| {
            plan.grid
                .par_iter()
                .map(|&x| {
                    let h = point_hamiltonian(plan, x)?;
                    let l = build_liouvillian(&h, &jumps)?;
                    let ss = steady_state(&l)?;
                    let jx = expectation_real(&ss.rho, &jx_op)?;
                    let jz = expectation_real(&ss.rho, &jz_op)?;
                    for (name, v) in [("jx", jx), ("jz", jz)] {
                        if v.abs() > bound {
                            return Err(Error::Numerical(format!(
                                "{name} = {v} exceeds the collective-spin bound {n} at b_x = {x}"
                            )));
                        }
                    }
                    Ok((x, jx, jz, ss.kernel_dim, ss.residual))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (x, jx, jz, kernel_dim, residual) in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{kernel_dim},{}",
                fmt(x),
                fmt(gamma),
                fmt(jx),
                fmt(jz),
                fmt(residual)
            );
        }
    }
    Ok(out)
}

fn branches(plan: &SweepPlan) -> Result<SpectrumBranches> {
    match &plan.sector {
        Some(_) => sweep_spectrum_with(|x| point_hamiltonian(plan, x), &plan.grid),
        None => sweep_spectrum(&plan.spec, &plan.grid),
    }
}

fn spectrum_csv(branches: &SpectrumBranches) -> String {
    let mut out = String::from("b_x,branch,eigenvalue\n");
    for (k, &x) in branches.grid().iter().enumerate() {
        for (i, v) in branches.values()[k].iter().enumerate() {
            let _ = writeln!(out, "{},{i},{}", fmt(x), fmt(*v));
        }
    }
    out
}

fn infidelity_csv(plan: &SweepPlan, pool: &rayon::ThreadPool) -> Result<String> {
    let delta_b = plan.delta_b.expect("checked during load");
    let diss = plan.diss.scaled(plan.gammas[0]);
    let rows: Vec<(f64, f64)> = pool.install(|| {
        plan.grid
            .par_iter()
            .map(|&x| infidelity_pair(&plan.spec, &diss, x, delta_b).map(|v| (x, v)))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out = String::from("b_x,infidelity\n");
    for (x, v) in rows {
        let _ = writeln!(out, "{},{}", fmt(x), fmt(v));
    }
    Ok(out)
}

fn crossings_json(plan: &SweepPlan) -> Result<String> {
    let branches = branches(plan)?;
    let tol = 1e-10 * branches.energy_scale().max(f64::MIN_POSITIVE);
    let mut reports = match &plan.sector {
        Some(_) => find_crossings_with(&branches, tol, |x| point_hamiltonian(plan, x))?,
        None => find_crossings(&branches, tol)?,
    };
    if plan.outputs.cnorms {
        // The condition normalizes rates to unit maximum, so any
        // positive overall scale gives identical results.
        evaluate_conditions(&plan.spec, &plan.diss.scaled(plan.gammas[0]), &mut reports)?;
    }
    let json = serde_json::to_string_pretty(&reports)
        .map_err(|e| Error::config(format!("cannot serialize crossing reports: {e}")))?;
    Ok(json + "\n")
}

/// Parsed cold-atom parameter file.
struct ParamFile {
    lambda: LambdaSystemParams,
    raman: Option<RamanFieldParams>,
    hubbard: Option<HubbardParams>,
}

fn load_param_file(path: &Path) -> Result<ParamFile> {
    let cfg = read_config(path)?;
    cfg.check_sections(&["lambda", "raman", "hubbard"])?;
    let l = cfg.require_section("lambda")?;
    l.check_keys(&[
        "omega1", "omega2", "delta_re", "omega_re", "gamma_eg", "gamma_er", "delta_gr", "eta1",
        "k1", "mass", "nu",
    ])?;
    let nu = l.f64("nu")?;
    let eta1 = match (l.get("eta1"), l.get("k1")) {
        (Some(_), Some(_)) => {
            return Err(entry_err(
                l,
                "eta1",
                "give either `eta1` directly or `k1` + `mass`, not both",
            ))
        }
        (Some(_), None) => l.f64("eta1")?,
        (None, Some(_)) => eta1_from_wavenumber(l.f64("k1")?, l.f64("mass")?, nu)?,
        (None, None) => {
            return Err(entry_err(
                l,
                "eta1",
                "missing `eta1` (or `k1` + `mass` to derive it)",
            ))
        }
    };
    let lambda = LambdaSystemParams {
        omega1: l.f64("omega1")?,
        omega2: l.f64("omega2")?,
        delta_re: l.f64("delta_re")?,
        omega_re: l.f64("omega_re")?,
        gamma_eg: l.f64("gamma_eg")?,
        gamma_er: l.f64("gamma_er")?,
        delta_gr: l.f64("delta_gr")?,
        eta1,
        nu,
    };
    let raman = match cfg.section("raman") {
        Some(r) => {
            r.check_keys(&["omega_a", "omega_b", "eta_b", "delta_e"])?;
            Some(RamanFieldParams {
                omega_a: r.f64("omega_a")?,
                omega_b: r.f64("omega_b")?,
                eta_b: r.f64("eta_b")?,
                delta_e: r.f64("delta_e")?,
            })
        }
        None => None,
    };
    let hubbard = match cfg.section("hubbard") {
        Some(h) => {
            h.check_keys(&["t0", "t1", "u00", "u11", "u01"])?;
            Some(HubbardParams {
                t0: h.f64("t0")?,
                t1: h.f64("t1")?,
                u00: h.f64("u00")?,
                u11: h.f64("u11")?,
                u01: h.f64("u01")?,
            })
        }
        None => None,
    };
    Ok(ParamFile {
        lambda,
        raman,
        hubbard,
    })
}

fn collect_warnings(p: &ParamFile) -> Result<Vec<String>> {
    let mut warnings = p.lambda.validate()?;
    if let Some(h) = &p.hubbard {
        warnings.extend(h.validate()?);
    }
    if let Some(r) = &p.raman {
        r.validate()?;
    }
    Ok(warnings)
}

fn compute(p: &ParamFile) -> Result<EffectiveParams> {
    effective_params(&p.lambda, p.raman.as_ref(), p.hubbard.as_ref())
}

fn cmd_params(p: &ParamFile) -> Result<()> {
    for w in collect_warnings(p)? {
        eprintln!("warning: {w}");
    }
    let eff = compute(p)?;
    let json = serde_json::to_string_pretty(&eff)
        .map_err(|e| Error::config(format!("cannot serialize parameters: {e}")))?;
    println!("{json}");
    Ok(())
}

fn cmd_check(p: &ParamFile) -> Result<()> {
    for w in collect_warnings(p)? {
        println!("warning: {w}");
    }
    let eff = compute(p)?;
    let mut satisfied = 0;
    for c in &eff.validity {
        println!(
            "{}: {} (lhs = {}, rhs = {}, margin = {})",
            c.id,
            if c.satisfied { "satisfied" } else { "violated" },
            fmt(c.lhs),
            fmt(c.rhs),
            fmt(c.margin)
        );
        if c.satisfied {
            satisfied += 1;
        }
    }
    println!(
        "result: {satisfied} of {} conditions satisfied",
        eff.validity.len()
    );
    Ok(())
}
