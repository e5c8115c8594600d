//! Thin command-line driver over [`regionlab::experiment`]: parse a JSON
//! config, run one stage, print its verdict, and exit 0 only if every check
//! the stage ran came out green (1 on a failed check, 2 on an error).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use regionlab::experiment::{self, load_config, RunConfig};

#[derive(Parser)]
#[command(name = "regionlab", version, about = "Approach-region laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Arguments shared by every stage.
#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory the stage writes its reports and tables into.
    #[arg(long)]
    out: PathBuf,
    /// Provenance seed recorded in every output; overrides the config's.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the region, complete it, and export traces and sections.
    BuildRegion(RunArgs),
    /// Export both section profiles and judge the section-size claims.
    Sections(RunArgs),
    /// Sample a shallow atom's extension and compare the two regions'
    /// maximal profiles on a shared grid.
    Maximal(RunArgs),
    /// Run the stratified weak-type scans on both regions.
    Weaktype(RunArgs),
    /// Run every stage and write the five-claim verdict.
    Verify(RunArgs),
}

fn configure(args: &RunArgs) -> experiment::Result<RunConfig> {
    let mut config = load_config(&args.config)?;
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    config.validate()?;
    Ok(config)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn run(command: &Command) -> experiment::Result<bool> {
    match command {
        Command::BuildRegion(args) => {
            let config = configure(args)?;
            let summary = experiment::run_build_region(&config, &args.out)?;
            println!(
                "build-region: {} levels after {} restart(s), t ranges {:e} .. {:e}",
                summary.levels,
                summary.restarts,
                summary.heights.last().copied().unwrap_or(f64::NAN),
                summary.heights.first().copied().unwrap_or(f64::NAN),
            );
            Ok(true)
        }
        Command::Sections(args) => {
            let config = configure(args)?;
            let summary = experiment::run_sections(&config, &args.out)?;
            println!(
                "sections: plain max ratio {:.4} (limit {}), completed ladder {}",
                summary.omega_max_ratio,
                summary.omega_threshold,
                verdict(summary.pass),
            );
            Ok(summary.pass)
        }
        Command::Maximal(args) => {
            let config = configure(args)?;
            let summary = experiment::run_maximal(&config, &args.out)?;
            println!(
                "maximal: {}x{} grid, peak {:.4} plain vs {:.4} completed, domination {}",
                summary.rows,
                summary.cols,
                summary.max_omega,
                summary.max_completed,
                verdict(summary.pass),
            );
            Ok(summary.pass)
        }
        Command::Weaktype(args) => {
            let config = configure(args)?;
            let summary = experiment::run_weaktype(&config, &args.out)?;
            println!(
                "weaktype: plain spread {:.4} (limit {}), completed growth {:.4} (floor {}) {}",
                summary.omega_spread,
                summary.spread_max,
                summary.completed_growth,
                summary.growth_min,
                verdict(summary.pass),
            );
            Ok(summary.pass)
        }
        Command::Verify(args) => {
            let config = configure(args)?;
            let report = experiment::run_verify(&config, &args.out)?;
            for claim in &report.claims {
                println!(
                    "claim ({}): {} — {}",
                    claim.id,
                    verdict(claim.pass),
                    claim.description
                );
            }
            println!(
                "envelope sweep: {} over {} samples",
                verdict(report.lemma_sweep.pass),
                report.lemma_sweep.samples.len(),
            );
            println!("verify: {}", verdict(report.all_pass));
            Ok(report.all_pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(2)
        }
    }
}
