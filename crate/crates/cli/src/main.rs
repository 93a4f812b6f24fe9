mod config;
mod experiments;
mod report;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use config::World;
use report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Slopes,
    SeriesInvariants,
    ChiVol,
    HsCheck,
    ConeScan,
    Certificate,
    Fekete,
    CheckAxioms,
}

impl Kind {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Runs one slope-calculus experiment and writes a CSV report.
///
/// Exit status: 0 when every check passes, 1 when a mathematical check
/// fails, 2 on configuration or I/O errors.
#[derive(Debug, Parser)]
#[command(name = "slope-lab", version)]
struct Cli {
    kind: Kind,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("configuring worker threads")?;
    }
    let world = World::load(&cli.config)?;
    let kind = cli.kind.name();
    if let Some(k) = &world.config.kind {
        if *k != kind {
            bail!("config is for {k:?} but {kind:?} was requested");
        }
    }
    let report: Report = match cli.kind {
        Kind::Slopes => experiments::slopes(&world),
        Kind::SeriesInvariants => experiments::series_invariants(&world),
        Kind::ChiVol => experiments::chi_vol(&world),
        Kind::HsCheck => experiments::hs_check(&world),
        Kind::ConeScan => experiments::cone_scan_rows(&world),
        Kind::Certificate => experiments::certificate(&world),
        Kind::Fekete => experiments::fekete(&world),
        Kind::CheckAxioms => experiments::axioms(&world, cli.seed),
    }?;
    let id = world.config.id.clone().unwrap_or(kind);
    let file = File::create(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    report.write_csv(&id, BufWriter::new(file))?;
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
