use aer_cli::{cmd_asymptote, cmd_forward, cmd_invert, cmd_study, CliError, RawConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

const GRAMMAR: &str = "\
Expressions (traces and source) use x, y, pi, decimal numbers,
+ - * / ^, unary minus, parentheses and sin cos tan tanh exp ln sqrt abs.
`^` is right-associative and binds tighter than unary minus.

Exit status: 0 success, 2 assumption violation, 3 numerical failure,
4 config or file error. AER_WORKERS caps study worker threads.";

#[derive(Parser)]
#[command(name = "aer", version, about = "Asymptotic analysis and source recovery for a singularly perturbed reaction-diffusion-advection problem", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration; omitted keys take preset values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Preset supplying defaults: example1 or example2.
    #[arg(long)]
    preset: Option<String>,
    /// Noise seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-volume solve; writes snapshot CSVs and forward.json.
    Forward(Common),
    /// Assumption checks, outer functions, front, layer width and U0.
    Asymptote(Common),
    /// Noisy observation, smoothing and source reconstruction.
    Invert(Common),
    /// Sweeps over delta, mu, grid and seeds.
    Study(Common),
}

type Handler = fn(&aer_cli::RunConfig, &std::path::Path) -> Result<serde_json::Value, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&Common, Handler) = match &cli.command {
        Command::Forward(a) => (a, cmd_forward),
        Command::Asymptote(a) => (a, cmd_asymptote),
        Command::Invert(a) => (a, cmd_invert),
        Command::Study(a) => (a, cmd_study),
    };
    let raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let cfg = raw.resolve(args.preset.as_deref(), args.seed)?;
    let summary = cmd(&cfg, &args.out)?;
    if let Some(m) = summary.get("rel_err_f") {
        println!("rel_err_f = {m}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
