use std::io::Write;
use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};
use radialfs::{load_config, parse_rect, write_artifacts, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
use radialfs_core::decay::{classification_map, write_raster_csv};
use radialfs_core::{list_experiments, run_experiment, ParamRegion, Scale};

#[derive(Parser)]
#[command(name = "radialfs", version, about = "Run radial function space experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file.
    Run {
        config: PathBuf,
        /// Spread independent cases over threads; output is identical.
        #[arg(long)]
        parallel: bool,
        /// Output directory; defaults to the config's `output` or `out/<experiment>`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long, env = "RADIALFS_SEED")]
        seed: Option<u64>,
        /// Suppress the summary on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// List experiments with a one-line description each.
    List,
    /// Raster CSV of a parameter region over the (1/p, s) plane.
    Map {
        #[arg(long)]
        region: String,
        /// `a,b,c,d`: 1/p in [a, b], s in [c, d].
        #[arg(long, value_parser = parse_rect_arg, allow_hyphen_values = true)]
        rect: [f64; 4],
        #[arg(long, default_value_t = 41)]
        res: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value = "B")]
        scale: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_rect_arg(v: &str) -> Result<[f64; 4], String> {
    parse_rect(v)
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => {
            for (name, doc) in list_experiments() {
                println!("{name:<24} {doc}");
            }
            EXIT_PASS
        }
        Command::Run { config, parallel, output, seed, quiet } => match run(config, parallel, output, seed, quiet) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_ERROR
            }
        },
        Command::Map { region, rect, res, d, q, scale, output } => match map(&region, rect, res, d, q, &scale, output) {
            Ok(()) => EXIT_PASS,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_ERROR
            }
        },
    };
    exit(code);
}

fn run(config: PathBuf, parallel: bool, output: Option<PathBuf>, seed: Option<u64>, quiet: bool) -> anyhow::Result<i32> {
    let mut cfg = load_config(&config)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let out = run_experiment(&cfg, parallel)?;
    let dir = output
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.experiment));
    let written = write_artifacts(&out, &dir)?;
    if !quiet {
        print!("{}", out.report.summary());
        for p in written {
            println!("wrote {}", p.display());
        }
    }
    Ok(if out.report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn map(region: &str, rect: [f64; 4], res: usize, d: usize, q: f64, scale: &str, output: Option<PathBuf>) -> anyhow::Result<()> {
    let scale = match scale {
        "B" | "b" => Scale::B,
        "F" | "f" => Scale::F,
        other => anyhow::bail!("--scale: expected B or F, got {other:?}"),
    };
    let region = ParamRegion::from_name(region, d, q, scale)?;
    let points = classification_map(&region, rect, res)?;
    match output {
        Some(p) => write_raster_csv(&points, std::fs::File::create(p)?)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_raster_csv(&points, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}
