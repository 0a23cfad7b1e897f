use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sheath::config::{parse_config_with_overrides, RunConfig};
use sheath::{execute, presets, Error};

/// Two-fluid plasma sheath simulations between floating walls.
#[derive(Parser)]
#[command(name = "sheath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write snapshots and a summary.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory, replacing `[output] dir`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and validate a configuration, then print it.
    CheckConfig {
        #[command(flatten)]
        source: Source,
    },
    /// Bundled presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset's configuration text.
    Show { name: String },
}

#[derive(Args)]
struct Source {
    /// Configuration file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name.
    #[arg(long)]
    preset: Option<String>,
    /// `section.key=value`, applied after the file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, Error> {
        match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
                parse_config_with_overrides(&text, &self.overrides)
            }
            (None, Some(name)) => presets::preset_with_overrides(name, &self.overrides),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_UNSTABLE: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() { EXIT_CONFIG } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets { action: PresetAction::List } => {
            for name in presets::names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Presets { action: PresetAction::Show { name } } => match presets::preset_text(&name) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::CheckConfig { source } => match source.load() {
            Ok(cfg) => {
                println!("{}: ok", cfg.name);
                println!("{:#?}", cfg.params);
                println!("n_cells: {}", cfg.mesh.n_cells());
                println!("{:#?}", cfg.scheme);
                println!("output: {}", cfg.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { source, output } => {
            let cfg = match source.load() {
                Ok(cfg) => cfg,
                Err(e) => return fail(&e),
            };
            let dir = output.unwrap_or_else(|| cfg.output_dir.clone());
            let exec = match execute(&cfg, &dir) {
                Ok(x) => x,
                Err(e) => return fail(&e),
            };
            let s = &exec.summary;
            println!(
                "{}: {:?} after {} steps, t = {:.6}, {:.1} s",
                s.scenario, s.status, s.steps, s.final_time, s.wall_clock_seconds
            );
            println!(
                "ambipolarity {:.4e}, phi peak {:.5} (target {:.5})",
                s.diagnostics.ambipolarity_err, s.diagnostics.phi_peak, s.targets.phi_peak
            );
            for c in &s.checks {
                println!("check {}: {} ({:.4e} <= {:.4e})", c.name, if c.passed { "pass" } else { "FAIL" }, c.value, c.threshold);
            }
            println!("wrote {}", dir.display());
            if exec.unstable() {
                eprintln!("error: {}", s.error.as_deref().unwrap_or("instability"));
                return ExitCode::from(EXIT_UNSTABLE);
            }
            ExitCode::SUCCESS
        }
    }
}
