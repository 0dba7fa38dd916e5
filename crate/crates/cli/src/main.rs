mod commands;
mod error;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use commands::{Outcome, SectorFlags};
use error::CliError;
use scenario::{ModeSpec, Scenario};

#[derive(Parser)]
#[command(name = "cstar-nets", version, about = "Checks and invariants for nets of finite-dimensional C*-algebras over posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Residual tolerance; falls back to the scenario, then 1e-10.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every object present in the scenario.
    Validate(Common),
    /// Fundamental group presentation at a base element.
    Pi1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        base: Option<String>,
    },
    /// Holonomy of the net or Hilbert net bundle.
    Holonomy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        base: Option<String>,
    },
    /// Transition cocycle of the net over a cover.
    Cocycle {
        #[command(flatten)]
        common: Common,
        /// Comma-separated cover elements.
        #[arg(long, value_delimiter = ',')]
        cover: Option<Vec<String>>,
    },
    /// Build the C(X)-algebra of the net over the space model.
    #[command(name = "build-c0x")]
    BuildC0x(Common),
    /// Universal fibres at every point and their comparison maps.
    UniversalCheck(Common),
    /// Validate a Fredholm module and compute its index family.
    Fredholm {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeSpec>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Index of a twisted sector module.
    SectorIndex {
        /// Scenario file; the circle poset is used when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        irrep: Option<String>,
        /// Character values per generator, `re` or `re:im`, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<String>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Compare two bundles by holonomy.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        base: Option<String>,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    scenario::parse(&text, &shown)
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate(c) => {
            let s = load(&c.input)?;
            commands::validate(&s, s.tolerance(c.tol)?)
        }
        Command::Pi1 { common, base } => {
            let s = load(&common.input)?;
            s.tolerance(common.tol)?;
            commands::pi1(&s, base.as_deref())
        }
        Command::Holonomy { common, base } => {
            let s = load(&common.input)?;
            commands::holonomy_cmd(&s, base.as_deref(), s.tolerance(common.tol)?)
        }
        Command::Cocycle { common, cover } => {
            let s = load(&common.input)?;
            commands::cocycle(&s, cover.as_deref(), s.tolerance(common.tol)?)
        }
        Command::BuildC0x(c) => {
            let s = load(&c.input)?;
            commands::build_c0x(&s, s.tolerance(c.tol)?)
        }
        Command::UniversalCheck(c) => {
            let s = load(&c.input)?;
            commands::universal_check(&s, s.tolerance(c.tol)?)
        }
        Command::Fredholm { common, mode, truncation } => {
            let s = load(&common.input)?;
            commands::fredholm(&s, *mode, *truncation, s.tolerance(common.tol)?)
        }
        Command::SectorIndex { input, tol, group, irrep, chi, truncation, .. } => {
            let s = input.as_ref().map(load).transpose()?;
            let tol = match &s {
                Some(s) => s.tolerance(*tol)?,
                None => tol.map_or(Ok(1e-10), |t| {
                    if t > 0.0 && t.is_finite() {
                        Ok(t)
                    } else {
                        Err(CliError::Input(format!("tolerance must be positive, got {t}")))
                    }
                })?,
            };
            let flags = SectorFlags { group: group.as_deref(), irrep: irrep.as_deref(), chi: chi.as_deref(), truncation: *truncation };
            commands::sector(s.as_ref(), &flags, tol)
        }
        Command::Classify { common, base } => {
            let s = load(&common.input)?;
            commands::classify(&s, base.as_deref(), s.tolerance(common.tol)?)
        }
    }
}

fn meta(command: &Command) -> (&'static str, Option<&PathBuf>) {
    match command {
        Command::Validate(c) => ("validate", c.output.as_ref()),
        Command::Pi1 { common, .. } => ("pi1", common.output.as_ref()),
        Command::Holonomy { common, .. } => ("holonomy", common.output.as_ref()),
        Command::Cocycle { common, .. } => ("cocycle", common.output.as_ref()),
        Command::BuildC0x(c) => ("build-c0x", c.output.as_ref()),
        Command::UniversalCheck(c) => ("universal-check", c.output.as_ref()),
        Command::Fredholm { common, .. } => ("fredholm", common.output.as_ref()),
        Command::SectorIndex { output, .. } => ("sector-index", output.as_ref()),
        Command::Classify { common, .. } => ("classify", common.output.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, output) = meta(&cli.command);
    let mut report = Map::new();
    report.insert("schema".into(), json!(1));
    report.insert("command".into(), json!(name));
    let code = match run(&cli.command) {
        Ok(out) => {
            report.extend(out.body);
            report.insert("verdict".into(), json!(if out.pass { "pass" } else { "fail" }));
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let input = e.is_input_error();
            report.insert("error".into(), json!(e.to_string()));
            report.insert("verdict".into(), json!(if input { "input_error" } else { "fail" }));
            if input {
                2
            } else {
                1
            }
        }
    };
    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize") + "\n";
    match output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write `{}`: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
