use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use twofluid::driver::{load_config, preset, preset_names, read_run, write_run, RunConfig};
use twofluid::integrate::run;
use twofluid::verify::audit::{conservation_audit, AuditReport, AuditThresholds};
use twofluid::verify::convergence::{convergence_study, describe};
use twofluid::verify::default_test_functions;
use twofluid::Error;

const AUDIT_FILE: &str = "audit.csv";
const RESIDUAL_FILE: &str = "residuals.csv";

#[derive(Parser)]
#[command(name = "twofluid", version, about = "Semi-discrete two-fluid flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a configuration, write snapshots and a conservation audit.
    Run {
        config: PathBuf,
        /// Final time (scaled), overriding the configuration.
        #[arg(long)]
        time: Option<f64>,
        /// Output directory, overriding the configuration.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fail when the conservation audit does not pass.
        #[arg(long)]
        strict: bool,
    },
    /// Weak residuals of a configuration for a list of stencil widths.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        eps_list: Vec<f64>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fail unless every residual decreases down the list.
        #[arg(long)]
        strict: bool,
    },
    /// Re-run the conservation audit on a run directory.
    Audit {
        dir: PathBuf,
        /// Also write the audit table into the directory.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Accepted for symmetry with `run`; the audit always fails on a breach.
        #[arg(long)]
        strict: bool,
    },
    /// List the bundled scenario presets.
    Presets,
}

/// Failure with its exit code: 1 for numerics, 2 for usage, configuration and I/O.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn numerical(message: String) -> Failure {
    Failure { code: 1, message }
}

fn load(path: &Path, time: Option<f64>, output: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let mut config = load_config(path)?;
    if let Some(t) = time {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure {
                code: 2,
                message: format!("--time must be positive, got {t}"),
            });
        }
        config.t_end = t;
        config.snapshot_every = config.snapshot_every.min(t);
    }
    if let Some(dir) = output {
        config.output_dir = dir;
    }
    Ok(config)
}

fn write_audit(dir: &Path, report: &AuditReport) -> Result<(), Failure> {
    let path = dir.join(AUDIT_FILE);
    std::fs::write(&path, report.to_csv()).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn report_audit(report: &AuditReport) -> Vec<String> {
    let failures = report.failures(&AuditThresholds::for_kappa1(report.kappa1));
    let mass = report.max_mass_drift();
    println!(
        "audit: mass drift {:.3e} / {:.3e}, momentum drift {:.3e} ({:.3e} per unit time), energy drift {:.3e}",
        mass[0],
        mass[1],
        report.max_momentum_drift(),
        report.momentum_drift_rate(),
        report.max_energy_drift()
    );
    for f in &failures {
        eprintln!("audit: {f}");
    }
    failures
}

fn cmd_run(config: PathBuf, time: Option<f64>, output: Option<PathBuf>, strict: bool) -> Result<(), Failure> {
    let config = load(&config, time, output)?;
    let scheme = config.scheme()?;
    let initial = config.initial_state()?;
    info!(
        "{}: {} cells, eps = {}, t_end = {}",
        config.scenario_name(),
        config.n_cells,
        config.params.eps,
        config.t_end
    );
    let dir = config.output_dir.clone();
    let (traj, failure) = match run(&scheme, initial, config.t_end, config.snapshot_every) {
        Ok(traj) => (traj, None),
        Err(f) => (*f.partial, Some(f.error)),
    };
    write_run(&dir, &config, &traj)?;
    let report = conservation_audit(&traj);
    write_audit(&dir, &report)?;
    if let Some(e) = failure {
        eprintln!("partial output written to {}", dir.display());
        return Err(e.into());
    }
    println!(
        "{} snapshots, {} steps (dt in [{:.3e}, {:.3e}]) written to {}",
        traj.snapshots.len(),
        traj.stats.steps,
        traj.stats.min_dt,
        traj.stats.max_dt,
        dir.display()
    );
    if traj.stats.clamped > 0 {
        warn!("{} density values clamped to r_min", traj.stats.clamped);
    }
    let failures = report_audit(&report);
    if strict && !failures.is_empty() {
        return Err(numerical(format!(
            "conservation audit failed ({} issue(s))",
            failures.len()
        )));
    }
    Ok(())
}

fn cmd_converge(
    config: PathBuf,
    eps_list: Vec<f64>,
    time: Option<f64>,
    output: Option<PathBuf>,
    strict: bool,
) -> Result<(), Failure> {
    let config = load(&config, time, output)?;
    if let Some(bad) = eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Failure {
            code: 2,
            message: format!("--eps-list entries must be positive, got {bad}"),
        });
    }
    let table = convergence_study(&config, &eps_list, &default_test_functions());
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", dir.display()),
    })?;
    table.write_csv(dir.join(RESIDUAL_FILE))?;
    print!("{}", table.to_csv());
    print!("{}", describe(&table));
    let failed: Vec<String> = table
        .rows
        .iter()
        .filter_map(|r| r.residuals.as_ref().err().map(|e| format!("eps = {}: {e}", r.eps)))
        .collect();
    for f in &failed {
        eprintln!("{f}");
    }
    if !failed.is_empty() {
        return Err(numerical(format!(
            "{} of {} runs failed",
            failed.len(),
            table.rows.len()
        )));
    }
    if strict && !table.strictly_decreasing().iter().all(|&d| d) {
        return Err(numerical("residuals do not decrease for every equation".into()));
    }
    Ok(())
}

fn cmd_audit(dir: PathBuf, output: Option<PathBuf>) -> Result<(), Failure> {
    let (_, traj) = read_run(&dir)?;
    let report = conservation_audit(&traj);
    if let Some(out) = output {
        std::fs::create_dir_all(&out).map_err(|e| Failure {
            code: 2,
            message: format!("{}: {e}", out.display()),
        })?;
        write_audit(&out, &report)?;
    }
    let failures = report_audit(&report);
    if failures.is_empty() {
        println!("audit passed ({} snapshots)", traj.snapshots.len());
        Ok(())
    } else {
        Err(numerical(format!("audit failed ({} issue(s))", failures.len())))
    }
}

fn cmd_presets() -> Result<(), Failure> {
    for name in preset_names() {
        let p = preset(&name)?;
        println!("{name}\t{}", p.description);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            time,
            output,
            strict,
        } => cmd_run(config, time, output, strict),
        Command::Converge {
            config,
            eps_list,
            time,
            output,
            strict,
        } => cmd_converge(config, eps_list, time, output, strict),
        Command::Audit { dir, output, .. } => cmd_audit(dir, output),
        Command::Presets => cmd_presets(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
