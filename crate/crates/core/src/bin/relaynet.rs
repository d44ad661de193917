use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use relaynet::experiment::{parse_config, run, ExperimentKind, ExperimentSpec};

/// Two-way relaying experiments: outage, DMT, crossing point, power allocation.
#[derive(Parser)]
#[command(name = "relaynet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage bounds against Monte Carlo, per SNR.
    Outage(Common),
    /// Finite-SNR diversity-multiplexing tradeoff curves.
    Dmt(Common),
    /// Exact and linearized crossing point of the two curves.
    Crossing(Common),
    /// Mean objectives of closed-form and numerical power allocation.
    Optimize(Common),
    /// Runs the oracle checks and prints a table of gaps.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials (outage, validate) or channel realizations (optimize).
    #[arg(long)]
    trials: Option<u64>,
    /// Relay position between the sources, in (0, 1).
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    pathloss: Option<f64>,
    /// Per-terminal SNR in dB: a list `a,b,c` or a range `start:step:stop`.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Network rate in bits per channel use.
    #[arg(long)]
    rate: Option<f64>,
    /// Multiplexing gains: a list or a range.
    #[arg(long)]
    mux: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "omega-g")]
    omega_g: Option<f64>,
    #[arg(long = "omega-h")]
    omega_h: Option<f64>,
    #[arg(long = "omega-f")]
    omega_f: Option<f64>,
}

impl Common {
    fn settings(&self) -> anyhow::Result<BTreeMap<String, String>> {
        let mut s = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let flags = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("trials", self.trials.map(|v| v.to_string())),
            ("distance", self.distance.map(|v| v.to_string())),
            ("pathloss", self.pathloss.map(|v| v.to_string())),
            ("snr-db", self.snr_db.clone()),
            ("rate", self.rate.map(|v| v.to_string())),
            ("mux", self.mux.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("omega-g", self.omega_g.map(|v| v.to_string())),
            ("omega-h", self.omega_h.map(|v| v.to_string())),
            ("omega-f", self.omega_f.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.insert(key.to_string(), v);
            }
        }
        Ok(s)
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let (kind, common) = match cli.command {
        Command::Outage(c) => (ExperimentKind::Outage, c),
        Command::Dmt(c) => (ExperimentKind::Dmt, c),
        Command::Crossing(c) => (ExperimentKind::Crossing, c),
        Command::Optimize(c) => (ExperimentKind::Optimize, c),
        Command::Validate(c) => (ExperimentKind::Validate, c),
    };
    let spec = ExperimentSpec::from_settings(kind, &common.settings()?)?;
    let artifact = run(&spec)?;
    let (stdout_text, stderr_text) = match &spec.out {
        Some(path) => {
            std::fs::write(path, &artifact.csv).with_context(|| format!("writing {}", path.display()))?;
            (&artifact.summary, "")
        }
        None => (&artifact.csv, artifact.summary.as_str()),
    };
    // A closed pipe downstream (`| head`) is not an error.
    let quiet = |r: std::io::Result<()>| match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e),
        _ => Ok(()),
    };
    quiet(std::io::stdout().lock().write_all(stdout_text.as_bytes()))?;
    quiet(std::io::stderr().lock().write_all(stderr_text.as_bytes()))?;
    Ok(artifact.passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
