use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optocool::cli_io::{execute, render, CliError, ConfigError, Document, RunSpec};

#[derive(Parser)]
#[command(
    name = "optocool",
    version,
    about = "Semiclassical optomechanical cooling with driven nonlinear cavities"
)]
struct Cli {
    /// Configuration file (`[section]` / `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Override a configuration value, e.g. `--set model.delta=-0.2`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// All fixed points with branch labels and universal parameters.
    FixedPoints,
    /// Photon-number spectrum on an omega grid.
    Spectrum,
    /// Optomechanical damping at the mechanical frequency.
    Damping,
    /// Residual and minimum phonon numbers.
    Phonons,
    /// One- or two-axis parameter sweep.
    Sweep,
    /// Detuning maximising the damping.
    Optimize,
    /// Cooling design from device parameters.
    Design,
    /// Dataset of a figure panel (1b ... 4d).
    Figure { id: String },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::FixedPoints => "fixed-points",
            Cmd::Spectrum => "spectrum",
            Cmd::Damping => "damping",
            Cmd::Phonons => "phonons",
            Cmd::Sweep => "sweep",
            Cmd::Optimize => "optimize",
            Cmd::Design => "design",
            Cmd::Figure { .. } => "figure",
        }
    }
}

fn build_spec(cli: &Cli) -> Result<RunSpec, CliError> {
    let mut doc = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            Document::parse(&text)?
        }
        None => Document::default(),
    };
    doc.set(&format!("run.command={}", cli.command.name()))?;
    if let Cmd::Figure { id } = &cli.command {
        doc.set(&format!("figure.id={id}"))?;
    }
    if let Some(f) = &cli.format {
        doc.set(&format!("run.format={f}"))?;
    }
    for s in &cli.set {
        doc.set(s)?;
    }
    Ok(RunSpec::from_document(&doc)?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let spec = build_spec(cli)?;
    if let Some(w) = spec.mech.and_then(|m| m.warning()) {
        eprintln!("warning: {w}");
    }
    let table = execute(&spec)?;
    let text = render(&table, &spec);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
