use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopf_renorm::commands::{self, HopfOp, Source};
use hopf_renorm::io::{character_from_json, read_json, BackendJson, CharacterJson, GraphJson};
use hopf_renorm::{CliError, EXIT_USAGE};
use hopf_renorm_core::characters::DEFAULT_ORDER;
use hopf_renorm_core::feynman::FeynmanRules;
use serde::Serialize;

/// Hopf-algebraic renormalization of φ³ theory on flat tori.
#[derive(Parser, Debug)]
#[command(name = "hopf-renorm", version)]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the 1PI generators with 1..=LOOPS loops and EXT legs.
    Graphs {
        #[arg(long)]
        loops: u32,
        #[arg(long)]
        ext: u32,
        /// Leave out graphs containing self-loops.
        #[arg(long)]
        no_tadpoles: bool,
    },
    /// Coproduct or antipode of a graph.
    Hopf {
        #[arg(value_enum)]
        op: OpArg,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Birkhoff decomposition of the regularized character.
    Bphz(RunArgs),
    /// Beta function and locality report.
    Beta {
        #[command(flatten)]
        run: RunArgs,
        /// Print the one-loop literature values instead.
        #[arg(long)]
        literature: bool,
        /// Allowed scale dependence of the counterterms, relative.
        #[arg(long, default_value_t = commands::DEFAULT_BETA_TOLERANCE)]
        locality_tolerance: f64,
        #[arg(long)]
        json: bool,
    },
    /// Conformal density checks.
    Conformal {
        #[command(subcommand)]
        action: ConformalAction,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum OpArg {
    Coproduct,
    Antipode,
}

#[derive(Subcommand, Debug)]
enum ConformalAction {
    /// Compare Ỹ under g -> e^{2f} g with the e^{-2fz} law.
    Check {
        #[arg(long = "n", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value = "0.1*cos(2*pi*x)")]
        f: String,
        #[arg(long, default_value_t = 0.1)]
        z: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Backend config JSON; overrides --dim/--mass/--cutoff.
    #[arg(long)]
    backend: Option<PathBuf>,
    /// Use this character (label -> series JSON) instead of the Feynman rules.
    #[arg(long, conflicts_with = "backend")]
    character: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 6)]
    cutoff: u32,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Largest loop number in the universe.
    #[arg(long, default_value_t = 1)]
    loops: u32,
    /// Leg counts of the generators.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3])]
    legs: Vec<u32>,
    #[arg(long)]
    no_tadpoles: bool,
    /// Truncation order of the series.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: i32,
    /// Allowed relative change of mode sums under cutoff doubling.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
}

impl RunArgs {
    fn source(&self) -> Result<Source, CliError> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(CliError::input("tolerance must lie in (0, 1)"));
        }
        if self.order < 0 {
            return Err(CliError::input("order must be non-negative"));
        }
        if let Some(path) = &self.character {
            let c: CharacterJson = read_json(path)?;
            return Ok(Source::Given(character_from_json(&c, self.order)?));
        }
        let config = match &self.backend {
            Some(path) => read_json::<BackendJson>(path)?,
            None => BackendJson { dim: self.dim, periods: vec![1.0; self.dim], mass: self.mass, cutoff: self.cutoff, ..Default::default() },
        };
        let rules = FeynmanRules::new(config.to_backend()?)
            .with_coupling(self.coupling)
            .with_order(self.order)
            .with_tolerance(self.tolerance);
        Source::rules(rules, self.loops, &self.legs, !self.no_tadpoles)
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Graphs { loops, ext, no_tadpoles } => Ok(json(&commands::graphs(*loops, *ext, !no_tadpoles)?)),
        Command::Hopf { op, graph, json: as_json } => {
            let g = read_json::<GraphJson>(graph)?.to_graph()?;
            let op = match op {
                OpArg::Coproduct => HopfOp::Coproduct,
                OpArg::Antipode => HopfOp::Antipode,
            };
            let r = commands::hopf(op, g.as_ref())?;
            Ok(if *as_json { json(&r) } else { r.result + "\n" })
        }
        Command::Bphz(run) => Ok(json(&commands::bphz(&run.source()?)?)),
        Command::Beta { run, literature, locality_tolerance, json: as_json } => {
            if *literature {
                return Ok(if *as_json { json(&literature_rows()) } else { commands::literature_table() });
            }
            let r = commands::beta(&run.source()?, *locality_tolerance)?;
            let text = if *as_json { json(&r) } else { r.table() };
            match r.refusal() {
                // the report still goes out so the deviations are visible
                Some(e) => {
                    emit(cli, &text).map_err(CliError::input)?;
                    Err(e)
                }
                None => Ok(text),
            }
        }
        Command::Conformal { action: ConformalAction::Check { n, grid, f, z, mass } } => {
            Ok(json(&commands::conformal_check(*n, *grid, f, *z, *mass)?))
        }
    }
}

#[derive(Serialize)]
struct LiteratureRow {
    theory: &'static str,
    coupling: &'static str,
    beta: &'static str,
}

fn literature_rows() -> Vec<LiteratureRow> {
    commands::literature()
        .iter()
        .map(|b| LiteratureRow { theory: b.theory, coupling: b.coupling, beta: b.beta })
        .collect()
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HOPF_RENORM_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("HOPF_RENORM_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = threads().and_then(|()| run(&cli)).and_then(|text| emit(&cli, &text).map_err(CliError::input));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hopf-renorm: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
