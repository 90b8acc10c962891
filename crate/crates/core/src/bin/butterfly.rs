//! Command-line front end: each subcommand runs one sweep or calibration and
//! writes its CSV/JSON into the output directory.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 numerical
//! failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use butterfly::harness::{
    cmd_calibrate, load_config, run_and_write, CalibrationKind, Command, ExperimentConfig, NoiseSpec, CONFIG_SCHEMA,
};

#[derive(Parser)]
#[command(name = "butterfly", version, about = "Butterfly-metrology simulations and calibration fits")]
struct Cli {
    /// JSON experiment configuration (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (no effect on results).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (overrides the config and $BUTTERFLY_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Replace the configured noise model.
    #[arg(long, global = true, value_enum)]
    preset_noise: Option<NoisePreset>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoisePreset {
    Table1,
    None,
}

#[derive(Subcommand)]
enum Cmd {
    /// OTOC light cone: otoc.csv
    Otoc,
    /// Sensing signal versus time and phase: sense.csv
    Sense,
    /// Inverted sensitivity versus time: sensitivity.csv
    Sensitivity,
    /// GME concurrence of the butterfly state: gme.csv
    Gme,
    /// otoc, sense, sensitivity and gme in turn
    All,
    /// Fit calibration data from a CSV file: calibration_<kind>.json
    Calibrate {
        #[arg(value_enum)]
        kind: Kind,
        input: PathBuf,
        /// Phase (rad) to convert to a pulse amplitude (zgate only; repeatable).
        #[arg(long = "target", allow_negative_numbers = true)]
        targets: Vec<f64>,
    },
    /// Print the resolved configuration as JSON
    ShowConfig,
    /// Print the configuration JSON schema
    Schema,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Distortion,
    Zgate,
    Chevron,
}

fn resolve(cli: &Cli) -> butterfly::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        config.out_dir = Some(dir.clone());
    }
    if let Some(preset) = cli.preset_noise {
        let name = match preset {
            NoisePreset::Table1 => "table1",
            NoisePreset::None => "none",
        };
        config.noise = Some(NoiseSpec::Preset(name.into()));
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> butterfly::Result<()> {
    let config = resolve(cli)?;
    let out_dir = config.resolved_out_dir();
    let sweep = |command: Command| -> butterfly::Result<()> {
        let path = run_and_write(command, &config, cli.workers, &out_dir)?;
        println!("wrote {}", path.display());
        Ok(())
    };
    match &cli.command {
        Cmd::Otoc => sweep(Command::Otoc),
        Cmd::Sense => sweep(Command::Sense),
        Cmd::Sensitivity => sweep(Command::Sensitivity),
        Cmd::Gme => sweep(Command::Gme),
        Cmd::All => [Command::Otoc, Command::Sense, Command::Sensitivity, Command::Gme].into_iter().try_for_each(sweep),
        Cmd::Calibrate { kind, input, targets } => {
            let kind = match kind {
                Kind::Distortion => CalibrationKind::Distortion,
                Kind::Zgate => CalibrationKind::Zgate,
                Kind::Chevron => CalibrationKind::Chevron,
            };
            let report = cmd_calibrate(kind, input, &config, targets)?;
            std::fs::create_dir_all(&out_dir)?;
            let path = out_dir.join(kind.file_name());
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            std::fs::write(&path, json + "\n")?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Cmd::ShowConfig => {
            let json = serde_json::to_string_pretty(&config).expect("configuration serializes");
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{json}");
            Ok(())
        }
        Cmd::Schema => {
            let _ = write!(std::io::stdout(), "{CONFIG_SCHEMA}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
