use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use instanton_lab::{run, CliError, CliResult, RunConfig};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "INSTANTON_LAB_WORKERS";

#[derive(Parser)]
#[command(name = "instanton-lab", version, about = "Verification suites for hyperKähler instanton models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triple identity, curvature and decay on the Calabi end.
    VerifyCalabi(RunArgs),
    /// Triple identity, curvature and period normalizations of the semi-flat model.
    VerifySemiflat(RunArgs),
    /// Parameter correspondence under the hyperKähler rotation.
    VerifyRotation(RunArgs),
    /// Special Lagrangian tori, negative controls and the fibration criterion.
    SlagCheck(RunArgs),
    /// Monodromy of the fibre lattice.
    Monodromy(RunArgs),
    /// Reflections, chambers and restriction quotients in exact arithmetic.
    Lattice(RunArgs),
    /// Randomized marked-lattice matching with planted Weyl corrections.
    Torelli(RunArgs),
    /// Every suite enabled in the config.
    All(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report file (json) or directory (csv); json goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    /// Modulus as `re,im`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    tau: Option<Vec<f64>>,
    #[arg(long)]
    b: Option<i64>,
    /// Exponent of the Kähler potential on the Calabi end.
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    timestamp: Option<String>,
    /// Print the per-check summary to stderr.
    #[arg(long)]
    summary: bool,
}

impl Command {
    fn split(self) -> (&'static str, RunArgs) {
        match self {
            Command::VerifyCalabi(a) => ("verify-calabi", a),
            Command::VerifySemiflat(a) => ("verify-semiflat", a),
            Command::VerifyRotation(a) => ("verify-rotation", a),
            Command::SlagCheck(a) => ("slag-check", a),
            Command::Monodromy(a) => ("monodromy", a),
            Command::Lattice(a) => ("lattice", a),
            Command::Torelli(a) => ("torelli", a),
            Command::All(a) => ("all", a),
        }
    }
}

fn resolve_config(args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = &args.tau {
        let [re, im] = t[..] else {
            return Err(CliError::Config(format!("--tau takes re,im, got {} values", t.len())));
        };
        cfg.tau = [re, im];
    }
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(p) = args.exponent {
        cfg.exponent = p;
    }
    if let Some(n) = args.samples {
        cfg.calabi.samples = n;
        cfg.semiflat.samples = n;
    }
    if let Some(ts) = &args.timestamp {
        cfg.timestamp = Some(ts.clone());
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn configure_workers() -> CliResult<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))
}

fn execute(command: &str, args: &RunArgs) -> CliResult<bool> {
    configure_workers()?;
    let cfg = resolve_config(args)?;
    let report = run(command, &cfg)?;
    if args.summary {
        eprint!("{}", report.summary());
    }
    match (args.format, &cfg.output) {
        (Format::Json, Some(path)) => {
            std::fs::write(path, report.to_json()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        }
        (Format::Json, None) => print!("{}", report.to_json()?),
        (Format::Csv, Some(dir)) => {
            for f in report.write_csv(dir)? {
                eprintln!("wrote {}", dir.join(f).display());
            }
        }
        (Format::Csv, None) => return Err(CliError::Config("--format csv needs --out <directory>".into())),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let (command, args) = Cli::parse().command.split();
    match execute(command, &args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
