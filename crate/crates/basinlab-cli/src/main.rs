use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use basinlab::basin::read_basin_csv;
use basinlab::cubetopo::{betti, from_basin};
use basinlab::scenario::{
    run_checks, run_scenario, summary_text, write_atomic, CheckId, RunReport, Scenario,
};
use basinlab::{configure_threads, SystemId};

#[derive(Parser)]
#[command(
    name = "basinlab",
    version,
    about = "Basin-of-attraction sweeps and cubical topology checks for surface flows"
)]
struct Cli {
    /// Artifact directory (default: runs/<scenario name>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Sweep worker threads; 0 keeps one per core
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Override the scenario's RNG seed for sampled checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: basin sweep, Betti profiles, verdict, checks, artifacts
    Run { config: PathBuf },
    /// Basin sweep only; writes basin.csv
    Basin { config: PathBuf },
    /// Betti profile of the converged region in an existing basin.csv
    Topo { grid: PathBuf },
    /// Field-level checks only: conjugacy, stationary fibers, gradients
    Verify { config: PathBuf },
    /// Re-render a run directory's report
    Report {
        dir: PathBuf,
        /// Machine-readable output instead of text
        #[arg(long)]
        json: bool,
    },
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let mut sc = Scenario::load(path)
        .with_context(|| format!("loading scenario {}", path.display()))?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn out_dir(flag: &Option<PathBuf>, sc: &Scenario) -> PathBuf {
    flag.clone().unwrap_or_else(|| PathBuf::from("runs").join(&sc.name))
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// The verification suite for a system: every check that probes fields and
/// maps directly, skipping the basin sweep entirely.
fn field_checks(system: SystemId) -> Vec<CheckId> {
    match system {
        SystemId::CircleR2 | SystemId::PuncturedR2 => vec![CheckId::Gradient],
        SystemId::CylinderM0 | SystemId::FunnelM => vec![
            CheckId::Conjugacy,
            CheckId::Stationary,
            CheckId::Jacobian,
            CheckId::DistanceBound,
        ],
    }
}

fn cmd_run(sc: &Scenario, dir: &Path) -> Result<bool> {
    let report = run_scenario(sc, dir)?;
    print!("{}", summary_text(&report));
    println!("artifacts: {}", dir.display());
    Ok(report.all_pass)
}

fn cmd_basin(sc: &Scenario, dir: &Path) -> Result<bool> {
    let sys = basinlab::SystemSpec::get(sc.system);
    let basin = basinlab::compute_basin(&sys, &sc.grid_spec(), &sc.integration_params())?;
    fs::create_dir_all(dir)?;
    let mut csv = Vec::new();
    basin.write_csv(&mut csv)?;
    let path = dir.join("basin.csv");
    write_atomic(&path, &csv)?;
    let (out, converged, timeout, diverged) = basin.counts();
    println!(
        "{}: {} converged, {} timeout, {} diverged, {} out",
        sc.name, converged, timeout, diverged, out
    );
    if basin.blowup_warnings > 0 {
        println!("warning: {} cells hit numerical blowup", basin.blowup_warnings);
    }
    println!("artifacts: {}", path.display());
    Ok(true)
}

fn cmd_topo(grid: &Path, out: &Option<PathBuf>) -> Result<bool> {
    let file = fs::File::open(grid).with_context(|| format!("opening {}", grid.display()))?;
    let basin = read_basin_csv(BufReader::new(file))?;
    let profile = betti(&from_basin(&basin)?);
    let text = json_line(&profile)?;
    println!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("basin_betti.json"), format!("{text}\n").as_bytes())?;
    }
    Ok(true)
}

fn cmd_verify(sc: &Scenario, out: &Option<PathBuf>) -> Result<bool> {
    let ids = field_checks(sc.system);
    let result = run_checks(sc, &ids)?;
    let mut all = true;
    for (name, check) in &result.checks {
        all &= check.pass;
        println!(
            "check {name}: {} (observed {:e}, threshold {:e}; {})",
            if check.pass { "PASS" } else { "FAIL" },
            check.observed,
            check.threshold,
            check.detail
        );
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut bytes = serde_json::to_vec_pretty(&result.checks)?;
        bytes.push(b'\n');
        write_atomic(&dir.join("checks.json"), &bytes)?;
    }
    println!("result: {}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}

/// Machine form with a fixed key set, whether or not a full report exists.
fn machine_report(
    system: &serde_json::Value,
    basin_betti: serde_json::Value,
    tubular_betti: serde_json::Value,
    verdict: serde_json::Value,
    checks: serde_json::Value,
    timings: serde_json::Value,
) -> serde_json::Value {
    serde_json::json!({
        "system": system,
        "basin_betti": basin_betti,
        "tubular_betti": tubular_betti,
        "verdict": verdict,
        "checks": checks,
        "timings": timings,
    })
}

fn cmd_report(dir: &Path, json: bool) -> Result<bool> {
    let report_path = dir.join("report.json");
    let timings: serde_json::Value = fs::read_to_string(dir.join("timings.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(serde_json::Value::Null);

    if report_path.is_file() {
        let text = fs::read_to_string(&report_path)?;
        let report: RunReport = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", report_path.display()))?;
        if json {
            let value = machine_report(
                &serde_json::to_value(report.system)?,
                serde_json::to_value(&report.basin_betti)?,
                serde_json::to_value(&report.tubular_betti)?,
                serde_json::to_value(&report.verdict)?,
                serde_json::to_value(&report.checks)?,
                timings,
            );
            println!("{}", json_line(&value)?);
        } else {
            print!("{}", summary_text(&report));
        }
        return Ok(report.all_pass);
    }

    let csv_path = dir.join("basin.csv");
    if !csv_path.is_file() {
        bail!("{} has neither report.json nor basin.csv", dir.display());
    }
    let file = fs::File::open(&csv_path)?;
    let basin = read_basin_csv(BufReader::new(file))?;
    let profile = betti(&from_basin(&basin)?);
    if json {
        let value = machine_report(
            &serde_json::to_value(basin.system)?,
            serde_json::to_value(&profile)?,
            serde_json::Value::Null,
            serde_json::Value::Null,
            serde_json::json!({}),
            timings,
        );
        println!("{}", json_line(&value)?);
    } else {
        let (out, converged, timeout, diverged) = basin.counts();
        println!("basin-only summary for {} (no report.json)", basin.system);
        println!(
            "  cells: {converged} converged, {timeout} timeout, {diverged} diverged, {out} out"
        );
        println!(
            "  basin Betti: b0={} b1={} (V={} E={} F={}, chi={})",
            profile.b0, profile.b1, profile.v, profile.e, profile.f, profile.chi
        );
    }
    Ok(true)
}

fn dispatch(cli: Cli) -> Result<bool> {
    configure_threads(cli.threads).map_err(|e| anyhow::anyhow!("{e}"))?;
    match &cli.cmd {
        Cmd::Run { config } => {
            let sc = load_scenario(config, cli.seed)?;
            cmd_run(&sc, &out_dir(&cli.out, &sc))
        }
        Cmd::Basin { config } => {
            let sc = load_scenario(config, cli.seed)?;
            cmd_basin(&sc, &out_dir(&cli.out, &sc))
        }
        Cmd::Topo { grid } => cmd_topo(grid, &cli.out),
        Cmd::Verify { config } => {
            let sc = load_scenario(config, cli.seed)?;
            cmd_verify(&sc, &cli.out)
        }
        Cmd::Report { dir, json } => cmd_report(dir, *json),
    }
}

fn main() -> ExitCode {
    // Die quietly when the reader closes the pipe (`basinlab report | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
