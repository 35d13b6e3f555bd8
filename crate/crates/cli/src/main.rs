use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ptsym_cli::output::sink;
use ptsym_cli::{evolve, scan, spectrum, verify, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "ptsym",
    version,
    about = "Pseudo-PT symmetry laboratory for SU(1,1) Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every residual check and write a JSON report.
    Verify(Common),
    /// Integrate from the eigenmode and write a CSV trajectory.
    Evolve(Common),
    /// Sweep an (Omega0, G0) grid and write a CSV table.
    Scan(Common),
    /// Write the lowest eigenvalues of H(0) as CSV.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(self.config.as_deref())?;
        config.apply(&Overrides {
            dim: self.dim,
            gamma: self.gamma,
            omega0: self.omega0,
            g0: self.g0,
            dt: self.dt,
            t_end: self.t_end,
            out: self.out.clone(),
        });
        config.validate()?;
        Ok(config)
    }
}

fn pool(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

/// Returns the exit status for a run that got past configuration.
fn run(command: Command) -> Result<u8, CliError> {
    let common = match &command {
        Command::Verify(c) | Command::Evolve(c) | Command::Scan(c) | Command::Spectrum(c) => c,
    };
    pool(common.threads)?;
    let config = common.load()?;
    let to_file = config.output_path.is_some();
    let mut out = sink(config.output_path.as_deref())?;
    match command {
        Command::Verify(_) => {
            let report = verify::run_verify(&config)?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            out.flush()?;
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            if failed.is_empty() {
                eprintln!(
                    "verify: {} checks passed, {} skipped",
                    report.checks.len(),
                    report.skipped.len()
                );
                Ok(0)
            } else {
                eprintln!("verify: failed {}", failed.join(", "));
                Ok(1)
            }
        }
        Command::Evolve(_) => {
            let result = evolve::run_evolve(&config)?;
            result.write_csv(&mut out)?;
            if to_file {
                println!("{}", result.summary());
            } else {
                eprintln!("{}", result.summary());
            }
            Ok(if result.diverged.is_some() { 1 } else { 0 })
        }
        Command::Scan(_) => {
            let rows = scan::run_scan(&config)?;
            scan::write_csv(&rows, &mut out)?;
            Ok(0)
        }
        Command::Spectrum(_) => {
            spectrum::run_spectrum(&config)?.write_csv(&mut out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ptsym: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
