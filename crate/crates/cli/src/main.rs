use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use torsion_cli::{parse_config, run, CliError, Command, ScanConfig, EXIT_OK};

/// S-integral torsion scans and reports.
#[derive(Debug, Parser)]
#[command(name = "tlab", version)]
struct Args {
    /// One of: mul-scan, mul-decompose, circle-discrepancy, baker-gap,
    /// ec-height, ec-torsion-scan, ec-equidist, tate-profile, selftest.
    command: Command,
    /// `key = value` configuration file (optional for selftest).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to the config `out` key, then `tlab-out/<command>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "TOOL_JOBS")]
    jobs: Option<usize>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            parse_config(&text)?
        }
        None if args.command == Command::Selftest => ScanConfig::default(),
        None => return Err(CliError::Config(vec![format!("{} needs --config", args.command)])),
    };
    if let Some(c) = cfg.command {
        if c != args.command {
            return Err(CliError::Config(vec![format!("config is for {c}, not {}", args.command)]));
        }
    }
    let bundle = run(args.command, &cfg)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("tlab-out").join(args.command.name()));
    bundle.write(&dir)?;
    print!("{}", bundle.summary_text());
    println!("reports written to {}", dir.display());
    match bundle.failed() {
        0 => Ok(()),
        failed => Err(CliError::InvariantsFailed { command: args.command.to_string(), failed }),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.jobs.filter(|&k| k > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().expect("thread pool is built once");
    }
    match execute(&args) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
