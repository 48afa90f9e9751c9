use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fallrisk::config::{load_config, CONFIG_ENV};
use fallrisk::examples;
use fallrisk::pipeline::{evaluate_modes, Aggregation, EvaluationSettings};
use fallrisk::room::{parse_layout, ParseOptions};
use fallrisk::Error;
use fallrisk_cli::output::{write_result, OutputFormat};
use fallrisk_cli::request::ModeSelection;
use fallrisk_cli::{exit_code, service};

#[derive(Parser)]
#[command(name = "fallrisk", version, about = "Fall-risk heat maps for patient-room layouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a layout and write results below the output directory.
    ///
    /// Files: <out>/<mode>/result.json, <field>.ppm and trajectories.ppm
    /// (images), <field>.csv (grids), where <field> is floor, light, support,
    /// door, baseline or final.
    Evaluate {
        /// Layout file (TOML).
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        layout: Option<PathBuf>,
        /// Bundled layout name instead of a file (see `fallrisk examples`).
        #[arg(long)]
        example: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeSelection::Both)]
        mode: ModeSelection,
        /// Settings file; see config/table1_defaults.toml for the keys.
        #[arg(long, env = CONFIG_ENV)]
        config: Option<PathBuf>,
        /// Overrides the settings file's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the settings file's aggregation.
        #[arg(long, value_parser = parse_agg)]
        agg: Option<Aggregation>,
        #[arg(long, default_value = "fallrisk-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::All)]
        format: OutputFormat,
        /// Warn about unknown layout fields instead of rejecting them.
        #[arg(long)]
        lenient: bool,
    },
    /// Run the HTTP evaluation service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// List bundled layouts, or print one.
    Examples {
        name: Option<String>,
    },
}

fn parse_agg(s: &str) -> Result<Aggregation, String> {
    s.parse()
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate {
            layout,
            example,
            mode,
            config,
            seed,
            agg,
            out,
            format,
            lenient,
        } => {
            let options = ParseOptions { lenient };
            let parsed = match (&layout, &example) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    parse_layout(&text, options)
                        .map_err(anyhow::Error::from)
                        .with_context(|| format!("in {}", path.display()))?
                }
                (None, Some(name)) => {
                    let text = examples::source(name).ok_or_else(|| Error::Schema {
                        path: "example".into(),
                        message: format!("no bundled layout named `{name}`"),
                    })?;
                    parse_layout(text, options)?
                }
                (None, None) => bail!("either --layout or --example is required"),
            };
            for w in &parsed.warnings {
                eprintln!("warning: {w}");
            }
            let mut settings = match &config {
                Some(path) => load_config(path)
                    .map_err(anyhow::Error::from)
                    .with_context(|| format!("in {}", path.display()))?,
                None => EvaluationSettings::default(),
            };
            if let Some(seed) = seed {
                settings.seed = seed;
            }
            if let Some(agg) = agg {
                settings.aggregation = agg;
            }
            let results = evaluate_modes(&parsed.layout, &settings, mode.modes())?;
            for result in &results {
                for w in &result.warnings {
                    eprintln!("warning: {}: {w}", result.mode);
                }
                write_result(&out, result, &parsed.layout, format)?;
                let s = result.summary;
                println!(
                    "{}: mean {:.4}  p95 {:.4}  max {:.4}  ({} trajectories)",
                    result.mode,
                    s.mean,
                    s.p95,
                    s.max,
                    result.trajectories.len()
                );
            }
            Ok(())
        }
        Command::Serve { bind, port } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port))
                    .await
                    .with_context(|| format!("binding {bind}:{port}"))?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, service::router()).await?;
                Ok(())
            })
        }
        Command::Examples { name } => {
            match name {
                None => {
                    for (name, _) in examples::BUNDLED {
                        println!("{name}");
                    }
                }
                Some(name) => {
                    let text = examples::source(&name).ok_or_else(|| Error::Schema {
                        path: "example".into(),
                        message: format!("no bundled layout named `{name}`"),
                    })?;
                    print!("{text}");
                }
            }
            Ok(())
        }
    }
}
