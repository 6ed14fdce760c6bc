use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use twirl_cli::commands::{
    cmd_batch, cmd_run, cmd_spectrum, cmd_trotter_scan, manifests_in, render, write_atomic, write_outputs, Format,
};
use twirl_cli::Overrides;

/// Shot count used by the published tables.
const PAPER_SHOTS: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "twirl", version, about = "Ancilla-twirling eigenstate filtering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, eigenvectors and observable values of a Schwinger Hamiltonian.
    Spectrum {
        #[arg(long, short = 'n')]
        qubits: usize,
        #[arg(long = "J", short = 'J', default_value_t = 1.0)]
        j: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write to DIR/spectrum-<n>q.<ext> instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write .txt, .csv and .json outputs into DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operator-norm Trotter error against exact evolution for several step counts.
    TrotterScan {
        #[arg(long, short = 'n')]
        qubits: usize,
        #[arg(long = "J", short = 'J', default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        tau: f64,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        steps: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run many manifests concurrently.
    Batch {
        /// Manifest files, or directories holding them.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, conflicts_with = "paper_shots")]
    shots: Option<u64>,
    /// Use the published 10^7 shots instead of the manifest's count.
    #[arg(long)]
    paper_shots: bool,
    /// exact | trotter | trotter:N
    #[arg(long)]
    backend: Option<String>,
    /// Adiabatic prelude, e.g. adiabatic:T=20,steps=400
    #[arg(long)]
    prepare: Option<String>,
}

impl OverrideArgs {
    fn into_overrides(self) -> Overrides {
        Overrides {
            seed: self.seed,
            shots: if self.paper_shots { Some(PAPER_SHOTS) } else { self.shots },
            backend: self.backend,
            prepare: self.prepare,
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum { qubits, j, format, out } => {
            let text = cmd_spectrum(qubits, j, format)?;
            match out {
                Some(dir) => write_atomic(&dir.join(format!("spectrum-{qubits}q.{}", format.extension())), &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Run { config, overrides, format, out } => {
            let (manifest, report) = cmd_run(&config, &overrides.into_overrides())?;
            print!("{}", render(&report, format));
            if let Some(dir) = out {
                for path in write_outputs(&report, manifest.output_stem(), &dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(report.passed())
        }
        Command::TrotterScan { qubits, j, tau, steps, format } => {
            print!("{}", cmd_trotter_scan(qubits, j, tau, &steps, format)?);
            Ok(true)
        }
        Command::Batch { configs, overrides, out } => {
            let mut paths = Vec::new();
            for c in configs {
                if c.is_dir() {
                    paths.extend(manifests_in(&c)?);
                } else {
                    paths.push(c);
                }
            }
            if paths.is_empty() {
                bail!("no manifests found");
            }
            let entries = cmd_batch(&paths, &overrides.into_overrides(), &out)?;
            let mut ok = true;
            for e in &entries {
                let status = match (&e.error, e.passed) {
                    (Some(_), _) => "error",
                    (None, true) => "ok",
                    (None, false) => "FAILED",
                };
                println!("{status:>6}  {}", e.name);
                if let Some(err) = &e.error {
                    println!("        {err}");
                }
                ok &= e.passed;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
