//! Front end for the `hlmetro` binary: argument and config handling,
//! command dispatch and output rendering.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

use anyhow::{ensure, Context, Result};
use serde::Serialize;

use args::{Cli, Command, FigureTarget, Format, GlobalArgs, Overlay, VariationalTarget};
use config::RunConfig;
use output::{render_csv, render_json};

fn render<T: Serialize>(rows: &[T], single: bool, format: Format) -> Result<String> {
    match format {
        Format::Json if single => render_json(&rows[0]),
        Format::Json => render_json(rows),
        Format::Csv => render_csv(rows),
    }
}

fn one<T: Serialize>(value: T, format: Format) -> Result<String> {
    render(&[value], true, format)
}

/// Runs a parsed command line and returns the rendered data together with
/// the merged global options.
pub fn execute(cli: Cli) -> Result<(String, GlobalArgs)> {
    let config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let global = cli.global.overlay(Some(&config.global()));
    let default_format = match cli.command {
        Command::Figure { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = global.format.unwrap_or(default_format);
    let seed = global.seed;

    let work = move || -> Result<String> {
        match cli.command {
            Command::Qfi(a) => one(commands::qfi(&a.overlay(config.qfi.as_ref()))?, format),
            Command::Bounds(a) => render(
                &commands::bounds(&a.overlay(config.bounds.as_ref()), seed)?,
                false,
                format,
            ),
            Command::Variational { target } => {
                let v = &config.variational;
                match target {
                    VariationalTarget::Simplex(a) => {
                        one(commands::simplex(&a.overlay(v.simplex.as_ref()))?, format)
                    }
                    VariationalTarget::Airy(a) => {
                        one(commands::airy(&a.overlay(v.airy.as_ref()))?, format)
                    }
                    VariationalTarget::Ball(a) => {
                        one(commands::ball(&a.overlay(v.ball.as_ref()))?, format)
                    }
                    VariationalTarget::Phase(a) => {
                        one(commands::phase(&a.overlay(v.phase.as_ref()), seed)?, format)
                    }
                }
            }
            Command::Table => render(&commands::table()?, false, format),
            Command::Figure { target } => {
                let f = &config.figure;
                match target {
                    FigureTarget::Ball(a) => render(
                        &commands::figure_ball(&a.overlay(f.ball.as_ref()))?,
                        false,
                        format,
                    ),
                    FigureTarget::Ratio(a) => render(
                        &commands::figure_ratio(&a.overlay(f.ratio.as_ref()))?,
                        false,
                        format,
                    ),
                }
            }
        }
    };
    let rendered = match global.threads {
        Some(t) => {
            ensure!(t > 0, "threads must be positive");
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .context("building the thread pool")?
                .install(work)?
        }
        None => work()?,
    };
    Ok((rendered, global))
}

/// Executes `cli` and writes the result to the requested destination.
pub fn run(cli: Cli) -> Result<()> {
    let (rendered, global) = execute(cli)?;
    match &global.output {
        Some(path) => {
            std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(rendered.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
