use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use specgame::harness::{
    analyze_directory, parse_spec, reproduce_figure, run_experiment, write_outputs, write_report,
    ExperimentSpec, StylizedFactReport, Verdict,
};

#[derive(Parser)]
#[command(name = "specgame", version, about = "Speculation Game simulations and stylized-fact analyses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of a config and write series, curves and the report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Master seed; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory; defaults to the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-analyze a directory written by `simulate`.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Write the plottable data behind one figure (2..=15).
    Reproduce {
        #[arg(long)]
        figure: u32,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

fn print_summary(report: &StylizedFactReport) {
    for fact in &report.facts {
        let verdict = match fact.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "n/a",
        };
        println!("{verdict:>4}  {}", fact.name);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            trials,
            out,
        } => {
            let mut spec = load_spec(&config)?;
            if let Some(seed) = seed {
                spec.game.seed = seed;
            }
            if let Some(trials) = trials {
                spec.trials = trials;
            }
            if let Some(out) = out {
                spec.output_dir = out;
            }
            spec.validate()?;
            let results = run_experiment(&spec)?;
            let written = write_outputs(&results, &spec.output_dir)?;
            print_summary(&results.report);
            println!("wrote {} files to {}", written.len(), spec.output_dir.display());
        }
        Command::Analyze { input, report } => {
            let (_, rep) = analyze_directory(&input)?;
            write_report(&rep, &report)?;
            print_summary(&rep);
        }
        Command::Reproduce { figure, config, out } => {
            let spec = match config {
                Some(path) => load_spec(&path)?,
                None => ExperimentSpec::default(),
            };
            let written = reproduce_figure(figure, &spec, &out)?;
            for path in written {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
