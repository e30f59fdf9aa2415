use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use confsym_cli::config::{Command, RunConfig};
use confsym_cli::{execute, CliError, EXIT_USAGE};

/// Conformal spectral geometry and branching-law laboratory.
#[derive(Debug, Parser)]
#[command(name = "confsym", version)]
struct Args {
    /// spectrum | zeta | heat-fit | invariants | functional | optimize |
    /// branch | discrete-spectrum | cone
    command: Option<String>,
    /// Parameters as key=value.
    params: Vec<String>,
    /// JSON run configuration; command-line values take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV dump path (spectrum table, trajectory or branching labels).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Exact rational output where an exact path exists.
    #[arg(long)]
    exact: bool,
    /// Print the merged configuration instead of running it.
    #[arg(long)]
    print_config: bool,
}

fn build(args: &Args) -> Result<RunConfig, CliError> {
    // With --config the command may be omitted, so a leading key=value is a parameter.
    let (command, params) = match &args.command {
        Some(c) if c.contains('=') => {
            let mut p = vec![c.clone()];
            p.extend(args.params.iter().cloned());
            (None, p)
        }
        c => (c.clone(), args.params.clone()),
    };
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => {
            let name = command
                .as_deref()
                .ok_or_else(|| CliError::Usage("no command given".into()))?;
            RunConfig::new(name.parse::<Command>()?)
        }
    };
    if let Some(c) = &command {
        cfg.command = c.parse()?;
    }
    cfg.set_pairs(&params)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    if args.exact {
        cfg.exact = true;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if args.csv.is_some() {
        cfg.csv = args.csv.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match build(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.print_config {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    ExitCode::from(execute(&cfg) as u8)
}
