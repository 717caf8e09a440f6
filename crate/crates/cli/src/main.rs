//! `mansion`: solve floorplans, build multi-floor layouts, furnish rooms,
//! evaluate against ground truth, and query scene documents.
//!
//! Exit codes: 0 success, 2 parse/validation failure, 3 infeasible layout,
//! 4 I/O failure, 1 anything else.

mod config;
mod manifest;
mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "mansion", version, about = "Deterministic multi-floor floorplan pipeline")]
struct Cli {
    /// RNG seed; all randomness derives from it (never wall-clock).
    #[arg(long, global = true, default_value_t = 0)]
    rng: u64,
    /// Worker-thread cap; results are identical at any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML config file (falls back to $MANSION_CONFIG, then defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Energy weights as `ratio,seed,corner,wall[,epsilon]`.
    #[arg(long, global = true)]
    weights: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a single floor from a room graph and a free region.
    SolveFloor {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        region: PathBuf,
        /// Seed source: `mc`, `ma=<floorplan.json>`, `external=<command>`,
        /// or `external-dir=<dir>`.
        #[arg(long, default_value = "mc")]
        seeds: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Required shared-boundary cells per adjacency edge.
        #[arg(long)]
        min_contact: Option<u32>,
    },
    /// Solve a whole building program, floor by floor.
    Build {
        #[arg(long)]
        program: PathBuf,
        #[arg(long, default_value = "mc")]
        seeds: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        min_contact: Option<u32>,
    },
    /// Furnish a room under placement constraints.
    Place {
        /// Room polygon + entrance (may be a combined document with objects).
        #[arg(long)]
        room: PathBuf,
        /// Objects + constraints; optional when `--room` is combined.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare prediction and ground-truth layout directories.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: u32,
        /// Manifest with category_map / vocabulary / palette.
        #[arg(long)]
        class_map: Option<PathBuf>,
        /// CSV output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query or edit a scene document.
    Scene {
        #[command(subcommand)]
        action: SceneAction,
    },
    /// Render a stored label map to PNG and/or SVG.
    Render {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        png: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Random-search energy weights against annotated samples.
    Tune {
        /// Directory of `<stem>.region.json` + `<stem>.graph.json` +
        /// `<stem>.annotation.json` triplets.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum SceneAction {
    /// Route between two rooms through doors, stairs, and elevators.
    CheckPath {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Objects resting on top of a target.
    CheckSurface {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Objects stored inside a container.
    SearchContents {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        container: String,
    },
    /// List objects, optionally filtered by room and keyword/id.
    List {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        room: Option<String>,
        #[arg(long)]
        keyword: Option<String>,
    },
    /// Serve line-delimited JSON tool requests on stdin/stdout.
    Serve {
        #[arg(long)]
        doc: PathBuf,
        /// Write the (possibly edited) document back on exit.
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Infeasible(String),
    Io(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Infeasible(m) | CliError::Io(m) | CliError::Other(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::ConfigFile::load(cli.config.as_deref()).map_err(CliError::Parse)?;
    let mut effective = file.resolve(cli.rng);
    if let Some(w) = &cli.weights {
        config::parse_weights_flag(w, &mut effective.weights).map_err(CliError::Parse)?;
    }
    match cli.command {
        Command::SolveFloor {
            graph,
            region,
            seeds,
            out,
            min_contact,
        } => {
            if let Some(mc) = min_contact {
                effective.solver.min_contact = mc;
            }
            commands::solve::run(&graph, &region, &seeds, &out, &effective)
        }
        Command::Build {
            program,
            seeds,
            out,
            min_contact,
        } => {
            if let Some(mc) = min_contact {
                effective.solver.min_contact = mc;
            }
            commands::build::run(&program, &seeds, &out, &effective)
        }
        Command::Place {
            room,
            constraints,
            out,
        } => commands::place::run(&room, constraints.as_deref(), &out, &effective),
        Command::Eval {
            pred,
            gt,
            resolution,
            class_map,
            out,
        } => commands::eval::run(&pred, &gt, resolution, class_map.as_deref(), out.as_deref(), &effective),
        Command::Scene { action } => commands::scene::run(action),
        Command::Render { map, png, svg } => commands::render::run(&map, png.as_deref(), svg.as_deref()),
        Command::Tune {
            samples,
            trials,
            out,
        } => commands::tune::run(&samples, trials, out.as_deref(), &effective),
    }
}
