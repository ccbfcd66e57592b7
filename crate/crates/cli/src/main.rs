//! `wzsim`: run Wyner-Ziv, dirty-paper and trellis experiments from the
//! command line and write one CSV row per grid point.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use wzsup::simlab::{run_experiment, write_csv, Axis, ExperimentSpec, GridValue, Mode, RunOptions};

#[derive(Parser)]
#[command(name = "wzsim", version, about = "Superposition Wyner-Ziv and dirty-paper experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-region boundary points (r0_min, sum_min, r0_max, r1_corner)
    Rates(RunArgs),
    /// Discrete Wyner-Ziv Monte Carlo with random codebooks
    Wz(RunArgs),
    /// Dithered Gaussian Wyner-Ziv Monte Carlo
    #[command(name = "wz-gaussian")]
    WzGaussian(RunArgs),
    /// Binary dirty-paper Monte Carlo
    Dpc(RunArgs),
    /// Convolutional-code (trellis) Wyner-Ziv pipeline
    Tcq(RunArgs),
    /// Exact error probabilities of small instances next to Monte Carlo estimates
    Oracle(RunArgs),
}

impl Command {
    fn split(self) -> (Mode, RunArgs) {
        match self {
            Command::Rates(a) => (Mode::Rates, a),
            Command::Wz(a) => (Mode::Wz, a),
            Command::WzGaussian(a) => (Mode::WzGaussian, a),
            Command::Dpc(a) => (Mode::Dpc, a),
            Command::Tcq(a) => (Mode::Tcq, a),
            Command::Oracle(a) => (Mode::Oracle, a),
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment spec; inline flags override its grid entries
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
    /// Trials per grid point
    #[arg(long)]
    trials: Option<u64>,
    /// Append a wall-clock duration column
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    grid: GridArgs,
}

/// Comma-separated lists; code generators use `;` between alternatives.
#[derive(clap::Args)]
struct GridArgs {
    /// Alphabet bits per symbol
    #[arg(long)]
    l: Option<String>,
    /// Block length
    #[arg(long)]
    n: Option<String>,
    /// Correlation-noise or channel crossover parameter
    #[arg(long)]
    p: Option<String>,
    /// C1 law parameter (discrete) or C1 power (Gaussian)
    #[arg(long)]
    q: Option<String>,
    /// Target distortion
    #[arg(long)]
    d: Option<String>,
    /// C0 rate in bits per symbol
    #[arg(long)]
    r0: Option<String>,
    /// C1 rate in bits per symbol
    #[arg(long)]
    r1: Option<String>,
    /// Dirty-paper cost constraint
    #[arg(long)]
    w: Option<String>,
    /// Side-information power
    #[arg(long)]
    py: Option<String>,
    /// Correlation-noise power
    #[arg(long)]
    pz: Option<String>,
    /// C0 power
    #[arg(long)]
    p0: Option<String>,
    /// Gaussian encoder-error slack factor
    #[arg(long)]
    slack: Option<String>,
    /// Redraw codebooks for every trial (true/false)
    #[arg(long)]
    redraw: Option<String>,
    /// C0 generators in octal, e.g. 133,171
    #[arg(long)]
    g0: Option<String>,
    /// C0 constraint length
    #[arg(long)]
    k0: Option<String>,
    /// C1 generators in octal
    #[arg(long)]
    g1: Option<String>,
    /// C1 constraint length
    #[arg(long)]
    k1: Option<String>,
}

impl GridArgs {
    fn entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("l", &self.l),
            ("n", &self.n),
            ("p", &self.p),
            ("q", &self.q),
            ("d", &self.d),
            ("r0", &self.r0),
            ("r1", &self.r1),
            ("w", &self.w),
            ("py", &self.py),
            ("pz", &self.pz),
            ("p0", &self.p0),
            ("slack", &self.slack),
            ("redraw", &self.redraw),
            ("g0", &self.g0),
            ("k0", &self.k0),
            ("g1", &self.g1),
            ("k1", &self.k1),
        ]
    }
}

fn parse_axis(key: &str, text: &str) -> Result<Axis> {
    let values = match key {
        "g0" | "g1" => text.split(';').map(|s| GridValue::Str(s.trim().to_string())).collect(),
        "redraw" => text
            .split(',')
            .map(|s| match s.trim() {
                "true" | "1" => Ok(GridValue::Bool(true)),
                "false" | "0" => Ok(GridValue::Bool(false)),
                other => bail!("--{key}: `{other}` is not a boolean"),
            })
            .collect::<Result<_>>()?,
        _ => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map(GridValue::Num)
                    .map_err(|_| anyhow::anyhow!("--{key}: `{}` is not a number", s.trim()))
            })
            .collect::<Result<_>>()?,
    };
    Ok(Axis::Many(values))
}

fn build_spec(mode: Mode, args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let spec = ExperimentSpec::from_json(&text)?;
            if spec.mode != mode {
                bail!("spec {} is for mode {}, not {mode}", path.display(), spec.mode);
            }
            spec
        }
        None => ExperimentSpec::new(mode),
    };
    for (key, value) in args.grid.entries() {
        if let Some(text) = value {
            spec.grid.insert(key.to_string(), parse_axis(key, text)?);
        }
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    if let Some(out) = &args.out {
        spec.out = Some(out.clone());
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    let (mode, args) = cli.command.split();
    let spec = build_spec(mode, &args)?;
    let options = RunOptions {
        threads: args.threads,
        timing: args.timing,
    };
    let rows = run_experiment(&spec, &options)?;
    match &spec.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("wzsim: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
