use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ionrep::experiments::{run_experiment, ExperimentKind, RunError, RunOptions};
use ionrep::{output, presets, verify};

/// Batch experiment runner for trapped-ion repeater-chain simulations.
///
/// Experiments write a CSV (one row per sweep point) and a JSON sidecar
/// recording the fully resolved parameters, the tool version and the seed.
#[derive(Parser)]
#[command(name = "ionrep", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment (table3, table4, table5, table6, fig2, fig4,
    /// fig6, direct, custom).
    Run {
        experiment: String,
        /// JSON config file with partial parameter overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for Monte Carlo sampling (mandatory when trials > 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo trial count (custom experiment only).
        #[arg(long)]
        trials: Option<u64>,
        /// Output CSV path (default: <experiment>.csv; the JSON sidecar is
        /// written next to it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites and report PASS/FAIL per suite.
    Verify {
        /// Run a single suite by name.
        #[arg(long)]
        suite: Option<String>,
    },
    /// List the named parameter sets.
    Presets,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { experiment, config, seed, trials, out } => {
            let Some(kind) = ExperimentKind::parse(&experiment) else {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                eprintln!("unknown experiment {experiment:?}; expected one of: {}", names.join(", "));
                return ExitCode::from(2);
            };
            let options = RunOptions { config_path: config, seed, trials, out: out.clone() };
            match run_and_write(kind, &options) {
                Ok((csv_path, rows)) => {
                    println!("wrote {rows} row(s) to {}", csv_path.display());
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("{err}");
                    ExitCode::from(err.exit_code() as u8)
                }
            }
        }
        Command::Verify { suite } => match verify::run_suites(suite.as_deref()) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        },
        Command::Presets => {
            for set in presets::all() {
                println!("{}: {}", set.name, set.description);
                println!(
                    "    p={} eta_d={} L_att={} km c={} km/s pair_rate={} Hz link_fidelity={}",
                    set.hardware.p,
                    set.hardware.eta_d,
                    set.hardware.l_att_km,
                    set.hardware.c_fiber_km_s,
                    set.hardware.pair_rate_hz,
                    set.hardware.link_fidelity
                );
                println!(
                    "    gate noise: 1-p_g1={:.1e}, 1-p_g2={:.1e}, coherence tau={} s",
                    1.0 - set.noise.p_g1,
                    1.0 - set.noise.p_g2,
                    set.noise.tau
                );
            }
            ExitCode::SUCCESS
        }
    }
}

fn run_and_write(kind: ExperimentKind, options: &RunOptions) -> Result<(PathBuf, usize), RunError> {
    let result = run_experiment(kind, options)?;
    let csv_path = options
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", result.experiment)));
    let sidecar_path = csv_path.with_extension("json");
    output::write_csv(&csv_path, &result.header, &result.rows)
        .map_err(|e| RunError::Io(format!("writing {}: {e}", csv_path.display())))?;
    output::write_sidecar(&sidecar_path, &result.sidecar)
        .map_err(|e| RunError::Io(format!("writing {}: {e}", sidecar_path.display())))?;
    Ok((csv_path, result.rows.len()))
}
