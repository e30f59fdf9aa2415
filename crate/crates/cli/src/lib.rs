//! Command-line front end: configuration, dispatch and report emission.

pub mod config;
pub mod report;

mod commands;

use std::path::Path;

use serde_json::{Map, Value};

use config::{Command, RunConfig};
use report::Report;

/// Exit status for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage and parameter errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a mathematical check fails.
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Math(#[from] confsym::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use confsym::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Math(e) => match e {
                E::Convergence(_) | E::Aliasing(_) | E::IllConditioned(_) | E::Continuation(_) => {
                    EXIT_VERIFY
                }
                _ => EXIT_USAGE,
            },
        }
    }
}

/// A finished run: the JSON document, an optional CSV dump and the failed
/// checks (empty on success).
#[derive(Debug)]
pub struct Outcome {
    pub json: String,
    pub csv: Option<String>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_VERIFY
        }
    }
}

/// Run a configuration and render its report.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut rep = Report::new();
    match cfg.command {
        Command::Spectrum => commands::spectral::spectrum(cfg, &mut rep)?,
        Command::Zeta => commands::spectral::zeta(cfg, &mut rep)?,
        Command::HeatFit => commands::spectral::heat_fit(cfg, &mut rep)?,
        Command::Invariants => commands::invariants::invariants(cfg, &mut rep)?,
        Command::Functional => commands::conformal::functional(cfg, &mut rep)?,
        Command::Optimize => commands::conformal::optimize(cfg, &mut rep)?,
        Command::Branch => commands::minrep::branch(cfg, &mut rep)?,
        Command::DiscreteSpectrum => commands::minrep::discrete_spectrum(cfg, &mut rep)?,
        Command::Cone => commands::cone::cone(cfg, &mut rep)?,
    }
    let csv = rep.take_csv();
    let failures = rep.failures().to_vec();
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String(cfg.command.name().into()));
    doc.insert(
        "status".into(),
        Value::String(if failures.is_empty() { "ok" } else { "verification_failed" }.into()),
    );
    if !failures.is_empty() {
        doc.insert(
            "failures".into(),
            Value::Array(failures.iter().cloned().map(Value::String).collect()),
        );
    }
    doc.extend(rep.into_fields());
    doc.insert("config".into(), config_echo(cfg));
    let mut json = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
    json.push('\n');
    Ok(Outcome {
        json,
        csv,
        failures,
    })
}

fn config_echo(cfg: &RunConfig) -> Value {
    let params: Map<String, Value> = cfg
        .params
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    report::obj(vec![
        ("params", Value::Object(params)),
        ("seed", Value::from(cfg.seed)),
        ("threads", Value::from(cfg.threads)),
        ("exact", Value::from(cfg.exact)),
    ])
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Run, write outputs and return the process exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let outcome = match run(cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cfg.out {
        Some(p) => write(p, &outcome.json),
        None => {
            print!("{}", outcome.json);
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&cfg.csv, &outcome.csv) {
        (Some(p), Some(c)) => write(p, c),
        (Some(_), None) => Err(CliError::Usage(format!(
            "command {} has no CSV output",
            cfg.command
        ))),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    for f in &outcome.failures {
        eprintln!("verification failed: {f}");
    }
    outcome.exit_code()
}
