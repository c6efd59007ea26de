use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momat_cli::{
    cmd_check_laws, cmd_compare, cmd_plot, cmd_run, cmd_sweep, parse_values, CliError, RunConfig,
    EXIT_ERROR,
};
use momat_core::evolution::Fault;

#[derive(Parser)]
#[command(
    name = "momat",
    version,
    about = "Five-agent monetary accounting simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Key-value config file (`key = value`, `#` comments).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Number of periods after t = 0.
    #[arg(long)]
    horizon: Option<u64>,
    /// `oracle` or `categorical`.
    #[arg(long)]
    engine: Option<String>,
}

impl ConfigArgs {
    fn load(&self, extra: &[(&str, Option<String>)]) -> Result<RunConfig, CliError> {
        let mut overrides = self.set.clone();
        let flags = [
            ("horizon", self.horizon.map(|h| h.to_string())),
            ("engine", self.engine.clone()),
        ];
        for (k, v) in flags.iter().chain(extra) {
            if let Some(v) = v {
                overrides.push(format!("{k}={v}"));
            }
        }
        Ok(RunConfig::load(self.config.as_deref(), &overrides)?)
    }
}

fn path_arg(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Run one engine and write the trace.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// CSV trace path; stdout when neither output is given.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON trace path, with the booking log.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run both engines and report their largest difference.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run once per value of one parameter, in parallel.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Summary path; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write panel data and a plotting script for a CSV trace.
    Plot {
        trace: PathBuf,
        #[arg(long, default_value = "plots")]
        out_dir: PathBuf,
    },
    /// Run the category law suites.
    CheckLaws {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut diag = io::stderr();
    let code = match command {
        Command::Run { config, csv, json } => {
            let cfg = config.load(&[("csv_out", path_arg(&csv)), ("json_out", path_arg(&json))])?;
            cmd_run(&cfg, &mut out, &mut diag)?
        }
        Command::Compare {
            config,
            inject_fault,
        } => {
            let fault = inject_fault.then(Fault::off_by_one);
            cmd_compare(&config.load(&[])?, fault, &mut out)?
        }
        Command::Sweep {
            config,
            param,
            values,
            out: path,
        } => {
            let cfg = config.load(&[])?;
            let values = parse_values(&values)?;
            match path {
                Some(p) => {
                    let mut w = momat_cli::create_file(&p)?;
                    let code = cmd_sweep(&cfg, &param, &values, &mut w)?;
                    w.flush()?;
                    code
                }
                None => cmd_sweep(&cfg, &param, &values, &mut out)?,
            }
        }
        Command::Plot { trace, out_dir } => cmd_plot(&trace, &out_dir, &mut diag)?,
        Command::CheckLaws { config } => cmd_check_laws(&config.load(&[])?, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
