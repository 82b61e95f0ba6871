//! The `polyagg` command-line tool.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyagg::config::{OutputFormat, WorkspaceConfig};
use polyagg::Error;

use crate::render::Output;

#[derive(Parser, Debug)]
#[command(name = "polyagg", version, about = "Polynomial functors, categorical databases and typed aggregation")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON config file with `cap`, `fin_k`, `seed` and `format`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bound on every enumeration.
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long = "fin-k", global = true)]
    fin_k: Option<usize>,
    /// Overrides both the config file and POLYAGG_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a file, report what it is and check its laws.
    Validate {
        file: PathBuf,
        /// Schema or category the file lives over (instances and queries).
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Skip detection: category, schema, instance, query, functor, span, conjunctive or bridge.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Evaluate a duc-query on an instance.
    Query {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Migrate an instance along a functor with Δ, Σ or Π.
    Migrate {
        #[arg(long)]
        functor: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "delta")]
        direction: Direction,
    },
    /// Aggregate attributes along a morphism.
    Aggregate {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        morphism: String,
    },
    /// Group the rows of a table by their image under a morphism.
    Groupby {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        morphism: String,
    },
    /// Dualize a span into a conjunctive bicomodule, or back.
    Dual { file: PathBuf },
    /// Transpose a span through the adjoint-and-dual route.
    Transpose { file: PathBuf },
    /// Build the skeleton of Fin truncated at K and check it.
    Finskeleton {
        /// Defaults to the smaller of `fin_k` and 4.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Polynomial calculator.
    Calc {
        #[command(subcommand)]
        op: CalcOp,
    },
    /// Run a law suite.
    Laws {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        cases: Option<usize>,
        /// Run against the mutated oracle; every case must then fail.
        #[arg(long = "self-test")]
        self_test: bool,
        /// Replay a single case by its index and case seed.
        #[arg(long, num_args = 2, value_names = ["CASE", "CASE_SEED"])]
        replay: Option<Vec<u64>>,
        /// List the suites and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    Delta,
    Sigma,
    Pi,
}

#[derive(Subcommand, Debug)]
enum CalcOp {
    /// p ◁ q
    Compose { p: String, q: String },
    /// p ⊗ q
    Tensor { p: String, q: String },
    /// p + q
    Sum { p: String, q: String },
    /// p × q
    Product { p: String, q: String },
    /// |Poly(p, q)|
    Homcount { p: String, q: String },
    /// [p, q], the closure of ⊗
    Hom { p: String, q: String },
    /// [p/q], the coclosure of ◁
    Coclosure { p: String, q: String },
    /// |p(X)| for |X| = n
    Eval { p: String, n: u64 },
}

fn config(g: &GlobalArgs) -> polyagg::Result<WorkspaceConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let path = path.display().to_string();
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), message: e.to_string() })?;
            let mut cfg = WorkspaceConfig::from_json_text(&text);
            if let Err(e) = &mut cfg {
                if let Some(loc) = e.location_mut() {
                    loc.file = Some(path);
                }
            }
            cfg?
        }
        None => WorkspaceConfig::default(),
    };
    cfg = cfg.from_env()?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(cap) = g.cap {
        cfg.cap = cap;
    }
    if let Some(k) = g.fin_k {
        cfg.fin_k = k;
    }
    match (g.json, g.format) {
        (true, _) | (_, Some(Format::Json)) => cfg.format = OutputFormat::Json,
        (_, Some(Format::Table)) => cfg.format = OutputFormat::Table,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli, cfg: &WorkspaceConfig) -> polyagg::Result<Output> {
    use commands::*;
    match cli.command {
        Command::Validate { file, schema, kind } => validate(&file, schema.as_deref(), kind.as_deref()),
        Command::Query { schema, instance, query: q } => query(&schema, &instance, &q, cfg),
        Command::Migrate { functor, instance, direction } => migrate(&functor, &instance, direction, cfg),
        Command::Aggregate { schema, instance, morphism } => aggregate(&schema, &instance, &morphism),
        Command::Groupby { schema, instance, morphism } => groupby(&schema, &instance, &morphism),
        Command::Dual { file } => dual(&file),
        Command::Transpose { file } => transpose(&file),
        Command::Finskeleton { k } => finskeleton(k.unwrap_or(cfg.fin_k.min(4)), cfg),
        Command::Calc { op } => calc(op, cfg),
        Command::Laws { suite, cases, self_test, replay, list } => {
            if list {
                Ok(list_suites())
            } else if let Some(r) = replay {
                replay_case(&suite, r[0] as usize, r[1], cfg)
            } else {
                laws(&suite, cases, self_test, cfg)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_hint = cli.global.json || matches!(cli.global.format, Some(Format::Json));
    let cfg = match config(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => return render::report_error(&e, json_hint),
    };
    let json = cfg.format == OutputFormat::Json;
    match run(cli, &cfg) {
        Ok(out) => out.emit(json),
        Err(e) => render::report_error(&e, json),
    }
}
