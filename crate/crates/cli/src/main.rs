use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use popgrowth::report::{emit_report, write_to, Report};
use popgrowth::{run_pipeline, Config, Format, PipelineError, Scope};
use popgrowth_core::unit_root::{critical_value, simulate_critical_values, UnitRootTest};
use popgrowth_core::{Level, TrendSpec};

#[derive(Parser, Debug)]
#[command(name = "popgrowth", version, about = "Demographic model of GDP per capita growth and its test battery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration; without it the bundled synthetic fixture is used
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output formats (repeatable); overrides the config
    #[arg(long, value_enum)]
    format: Vec<Format>,
    /// Monte-Carlo seed; overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Calibrate the model and predict the defining-age population
    Calibrate(Common),
    /// Calibration plus unit-root, cointegration and lag-selection tests
    Test(Common),
    /// Full pipeline, all tables
    Run(Common),
    /// Compare tabulated unit-root critical values with a simulation
    SimulateCv {
        #[arg(long, default_value = "adf")]
        test: UnitRootTest,
        #[arg(long, default_value = "constant")]
        trend: TrendSpec,
        #[arg(long, default_value_t = 41)]
        n_obs: usize,
        #[arg(long, default_value_t = 50_000)]
        reps: usize,
        #[arg(long, default_value_t = 20_070_101)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn load(common: &Common) -> Result<Config, PipelineError> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::synthetic(),
    };
    if !common.format.is_empty() {
        config.dataset.formats = common.format.clone();
    }
    if let Some(seed) = common.seed {
        config.monte_carlo.seed = seed;
    }
    if let Some(out) = &common.out {
        config.dataset.output_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn emit(report: &Report, config: &Config) -> Result<(), ExitCode> {
    match emit_report(report, &config.dataset.output_dir, &config.dataset.formats) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(1))
        }
    }
}

fn pipeline(common: &Common, scope: Scope) -> ExitCode {
    let config = match load(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_pipeline(&config, scope) {
        Ok(report) => {
            if let Err(code) = emit(&report, &config) {
                return code;
            }
            let _ = write_to(&report, Format::Text, io::stdout().lock());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let PipelineError::Stage { partial, .. } = &e {
                let _ = emit(partial, &config);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn simulate_cv(test: UnitRootTest, trend: TrendSpec, n_obs: usize, reps: usize, seed: u64, format: Format) -> ExitCode {
    let result = simulate_critical_values(test, trend, n_obs, reps, seed).and_then(|sim| {
        Level::ALL
            .into_iter()
            .map(|l| Ok((l, critical_value(test, trend, n_obs, l)?, sim.get(l))))
            .collect::<popgrowth_core::Result<Vec<_>>>()
    });
    let rows = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_numerical() { 3 } else { 1 });
        }
    };
    match format {
        Format::Json => {
            let v: Vec<_> =
                rows.iter().map(|(l, t, s)| serde_json::json!({ "level": l, "table": t, "simulated": s })).collect();
            let doc = serde_json::json!({
                "test": test, "trend": trend, "n_obs": n_obs, "replications": reps, "seed": seed, "values": v
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
        }
        Format::Text | Format::Csv => {
            println!("{test} trend {trend}, T = {n_obs}, {reps} replications, seed {seed}");
            println!("level      table  simulated  difference");
            for (l, t, s) in rows {
                println!("{:<5} {:>10.4} {:>10.4} {:>11.4}", l.label(), t, s, s - t);
            }
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Calibrate(c) => pipeline(c, Scope::Model),
        Command::Test(c) => pipeline(c, Scope::Tests),
        Command::Run(c) => pipeline(c, Scope::Full),
        Command::SimulateCv { test, trend, n_obs, reps, seed, format } => {
            simulate_cv(*test, *trend, *n_obs, *reps, *seed, *format)
        }
    }
}
