use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smcg::harness::{self, presets, ExperimentConfig};
use smcg::metrics::ComplexityAlgorithm;

/// Set-membership CG beamforming experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML experiment file.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $SMCG_OUT_DIR or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override any configuration key, e.g. `--set scenario.snr_db=5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the resolved configuration and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Write the arithmetic-complexity table.
    Complexity {
        #[arg(long, default_value_t = 8)]
        m_min: u64,
        #[arg(long, default_value_t = 64)]
        m_max: u64,
        #[arg(long, default_value_t = 1000)]
        snapshots: u64,
        #[arg(long, default_value_t = 3)]
        l: u64,
        /// Update rate for every data-selective row instead of the defaults.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the built-in presets.
    ListPresets,
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("SMCG_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: Cli) -> smcg::Result<()> {
    match cli.command {
        Command::ListPresets => {
            for name in presets::names() {
                println!("{name:<10} {}", presets::describe(name).unwrap_or(""));
            }
        }
        Command::Complexity {
            m_min,
            m_max,
            snapshots,
            l,
            tau,
            out,
        } => {
            let taus: Vec<_> = ComplexityAlgorithm::ALL
                .iter()
                .map(|&a| match tau {
                    Some(t) if a.is_data_selective() => (a, t),
                    _ => (a, harness::default_tau(a)),
                })
                .collect();
            harness::emit_complexity_table(m_min..=m_max, &taus, l, snapshots, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Run {
            preset,
            config,
            runs,
            seed,
            out,
            overrides,
            dump_config,
        } => {
            let mut cfg = match (preset, config) {
                (Some(name), _) => presets::preset(&name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| smcg::Error::Io { path: path.clone(), source: e })?;
                    ExperimentConfig::from_toml(&text)?
                }
                (None, None) => unreachable!("clap enforces one source"),
            };
            if let Some(r) = runs {
                cfg.set(&format!("runs={r}"))?;
            }
            if let Some(s) = seed {
                cfg.set(&format!("master_seed={s}"))?;
            }
            for o in &overrides {
                cfg.set(o)?;
            }
            if dump_config {
                print!("{}", cfg.to_toml()?);
                return Ok(());
            }
            let dir = out_dir(out);
            harness::write_text(&cfg.to_toml()?, &dir.join(format!("{}.toml", cfg.name)))?;
            if let Some(sweep) = &cfg.sweep {
                let points = harness::run_sweep(&cfg)?;
                let path = dir.join(format!("{}_sweep.csv", cfg.name));
                harness::emit_sweep_csv(&points, sweep.tail_fraction, &path)?;
                let text: String = points.iter().map(|p| harness::summary(&p.result) + "\n").collect();
                harness::write_text(&text, &dir.join(format!("{}_summary.txt", cfg.name)))?;
                print!("{text}");
                println!("wrote {}", path.display());
            } else {
                let result = harness::run_experiment(&cfg)?;
                let path = dir.join(format!("{}.csv", cfg.name));
                harness::emit_csv(&result, &path)?;
                let text = harness::summary(&result);
                harness::write_text(&text, &dir.join(format!("{}_summary.txt", cfg.name)))?;
                print!("{text}");
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
