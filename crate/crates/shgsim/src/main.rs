use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shgsim::config::{read_config_file, resolve, Overrides};
use shgsim::oracle::{as_rows, compare, fock_reference};
use shgsim::output::{to_csv, with_suffix, write_file};
use shgsim::sweep::{parse_pumps, sweep};
use shgsim::{run, Result, SimConfig};

/// Positive-P simulation of single-pass second harmonic generation with a
/// coherent or squeezed pump.
#[derive(Debug, Parser)]
#[command(name = "shgsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one ensemble and write `<out>` plus `<out>.meta.json`.
    Run(RunArgs),
    /// One run per pump setting, written to `<out stem>_<i>_<label>.csv`.
    Sweep {
        /// `x:R`, `y:R`, `coherent`, comma separated, or `figures`.
        #[arg(long, default_value = "figures")]
        pumps: String,
        #[command(flatten)]
        args: RunArgs,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML file with the same keys as the flags (underscores for dashes).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Overrides,
}

impl RunArgs {
    fn resolve(&self) -> Result<(SimConfig, bool)> {
        let file = self.config.as_deref().map(read_config_file).transpose()?;
        resolve(file.as_ref(), &self.flags)
    }
}

const ORACLE_QUANTITIES: [&str; 5] = ["Na", "VXa", "VXb", "DS_minus", "g2a"];

fn run_oracle(cfg: &SimConfig, reports: &[shgsim_core::ReportWithErrors]) -> Result<()> {
    let exact = fock_reference(cfg)?;
    let path = with_suffix(&cfg.out, ".oracle");
    write_file(&path, &to_csv(&as_rows(&exact)))?;
    let devs = compare(reports, &exact, &ORACLE_QUANTITIES);
    let worst = devs.iter().max_by(|a, b| a.sigmas().total_cmp(&b.sigmas()));
    println!("number-state reference written to {}", path.display());
    if let Some(w) = worst {
        println!(
            "largest deviation: {} at zeta = {}: {} vs exact {} ({:.2} SE)",
            w.quantity,
            w.zeta,
            w.sampled,
            w.exact,
            w.sigmas()
        );
    }
    Ok(())
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let (cfg, oracle) = args.resolve()?;
            let (out, written) = run(&cfg)?;
            println!(
                "wrote {} and {} ({:.1} s)",
                written.csv.display(),
                written.metadata.display(),
                out.wall_time_s
            );
            if oracle {
                run_oracle(&cfg, &out.reports)?;
            }
        }
        Command::Sweep { pumps, args } => {
            let (cfg, _) = args.resolve()?;
            let pumps = parse_pumps(&pumps)?;
            for w in sweep(&cfg, &pumps)? {
                println!("wrote {}", w.csv.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
