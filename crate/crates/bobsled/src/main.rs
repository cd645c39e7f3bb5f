use std::path::PathBuf;
use std::process::ExitCode;

use bobsled::commands::{self, Output, TableRanges};
use bobsled::config::{self, Config};
use bobsled::schema::Schema;
use bobsled::{Error, Result};
use clap::{Args, Parser, Subcommand};

/// Bobsled runner-ice friction analysis.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
/// 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "bobsled", version)]
struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Telemetry column mapping (JSON); overrides the configured schema.
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    /// Directory for the output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads for multi-file commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for simulated sensor noise.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ProcessingArgs {
    /// Low-pass cutoff before the analysis [Hz].
    #[arg(long)]
    cutoff: Option<f64>,
    /// Analysis sample rate [Hz].
    #[arg(long)]
    rate: Option<f64>,
    /// Roll-acceleration exclusion threshold [°/s²].
    #[arg(long)]
    roll_threshold: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Friction coefficients from paired ice-house glide runs.
    Icehouse {
        /// Glide-run CSV files.
        files: Vec<PathBuf>,
        /// Extra (p [MPa], μ_x) points for the quadratic fit (CSV with `p`, `mu`).
        #[arg(long)]
        points: Option<PathBuf>,
        /// Central share of each run used for the energy slope.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Fit the lateral friction law at both runners from telemetry.
    Fit {
        files: Vec<PathBuf>,
        #[command(flatten)]
        processing: ProcessingArgs,
        /// Track tag whose runs are held out for validation.
        #[arg(long)]
        holdout: Option<String>,
    },
    /// Loss-energy driver evaluation.
    Eval {
        files: Vec<PathBuf>,
        /// Lateral friction parameters (TOML).
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        processing: ProcessingArgs,
        /// Distance window `START:END` [m].
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// Simulate a scenario into synthetic telemetry and true forces.
    Simulate {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// Plot data for the friction laws.
    FrictionTable {
        /// Lateral friction parameters (TOML).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Pressure range `MIN:MAX:STEP` [MPa].
        #[arg(long, value_parser = parse_range3)]
        pressure: Option<(f64, f64, f64)>,
        /// Normal forces of the lateral curves [N].
        #[arg(long, value_delimiter = ',')]
        fz: Vec<f64>,
        /// Slip range `MAX:STEP` [°], evaluated over ±MAX.
        #[arg(long, value_parser = parse_range2)]
        alpha: Option<(f64, f64)>,
    },
}

fn numbers(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != n {
        return Err(format!("expected {n} values separated by `:`"));
    }
    Ok(parts)
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    numbers(s, 2).map(|v| (v[0], v[1]))
}

fn parse_range2(s: &str) -> std::result::Result<(f64, f64), String> {
    numbers(s, 2).map(|v| (v[0], v[1]))
}

fn parse_range3(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    numbers(s, 3).map(|v| (v[0], v[1], v[2]))
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = config::load(cli.config.as_deref(), |k| std::env::var(k).ok())?;
    if let Some(path) = &cli.schema {
        let input = config::read_config_input(path)?;
        config.schema = Schema::parse(&input)?;
        config.inputs.push(input);
    }
    Ok(config)
}

fn processing(config: &Config, args: &ProcessingArgs) -> Result<config::Processing> {
    let mut p = config.processing.clone();
    if let Some(c) = args.cutoff {
        p.cutoff = c;
    }
    if let Some(r) = args.rate {
        p.rate = r;
    }
    if let Some(t) = args.roll_threshold {
        p.roll_threshold = t;
    }
    p.validate(std::path::Path::new("<command line>"))
        .map_err(|e| Error::Usage(e.to_string()))?;
    Ok(p)
}

fn run(cli: &Cli) -> Result<Vec<Output>> {
    if cli.jobs == 0 {
        return Err(Error::Usage("--jobs must be at least 1".into()));
    }
    let config = load_config(cli)?;
    match &cli.command {
        Command::Icehouse {
            files,
            points,
            window,
        } => {
            let window = window.unwrap_or(config.processing.glide_window);
            commands::icehouse(&config, cli.jobs, files, points.as_deref(), window)
        }
        Command::Fit {
            files,
            processing: args,
            holdout,
        } => commands::fit(
            &config,
            &processing(&config, args)?,
            cli.jobs,
            files,
            holdout.as_deref(),
        ),
        Command::Eval {
            files,
            params,
            processing: args,
            window,
        } => commands::eval(
            &config,
            &processing(&config, args)?,
            cli.jobs,
            files,
            params.as_deref(),
            *window,
        ),
        Command::Simulate { scenario } => commands::simulate(&config, scenario, cli.seed),
        Command::FrictionTable {
            params,
            pressure,
            fz,
            alpha,
        } => {
            let mut ranges = TableRanges::default();
            if let Some((lo, hi, step)) = *pressure {
                (ranges.p_min, ranges.p_max, ranges.p_step) = (lo, hi, step);
            }
            if !fz.is_empty() {
                ranges.f_z = fz.clone();
            }
            if let Some((max, step)) = *alpha {
                (ranges.alpha_max, ranges.alpha_step) = (max, step);
            }
            commands::friction_table(&config, &ranges, params.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|outputs| commands::write_outputs(&cli.out_dir, &outputs)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
