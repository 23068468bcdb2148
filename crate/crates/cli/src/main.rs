use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand, ValueEnum};

use domcert_cli::commands;
use domcert_cli::CliError;

/// Dominator certification toolkit: minimum valid arc sets, low-high
/// orders, and divergent spanning trees for directed flow graphs.
#[derive(Parser)]
#[command(name = "domcert", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the immediate-dominator map, one "v d(v)" line per vertex
    Dom { graph: PathBuf },
    /// Print a low-high order of the dominator tree, one vertex per line
    Lowhigh { graph: PathBuf },
    /// Compute a minimum valid arc set for a spanning tree
    Validset { graph: PathBuf, tree: PathBuf },
    /// Check that an arc set is valid for a spanning tree
    Verify {
        graph: PathBuf,
        tree: PathBuf,
        /// Arc-set file; `-` reads standard input
        arcset: PathBuf,
    },
    /// Build two divergent spanning trees
    Divergent {
        graph: PathBuf,
        /// Restrict arc choices to this arc set
        #[arg(long)]
        restrict: Option<PathBuf>,
    },
    /// Generate a seeded random flow graph (and optionally a tree)
    Gen {
        /// Vertex count
        n: u32,
        /// Arc count (at least n-1, at most n(n-1))
        m: usize,
        /// RNG seed; all randomness flows from it
        #[arg(long)]
        seed: u64,
        /// Also extract and write a spanning tree
        #[arg(long, value_enum)]
        tree: Option<Strategy>,
        /// Output path prefix: writes <out>.fg (or .dot) and <out>.tree
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Edgelist)]
        format: Format,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Strategy {
    Bfs,
    Dfs,
    Random,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Edgelist,
    Dot,
}

fn run(cmd: Cmd) -> Result<String, CliError> {
    match cmd {
        Cmd::Dom { graph } => commands::cmd_dom(&graph),
        Cmd::Lowhigh { graph } => commands::cmd_lowhigh(&graph),
        Cmd::Validset { graph, tree } => commands::cmd_validset(&graph, &tree),
        Cmd::Verify { graph, tree, arcset } => commands::cmd_verify(&graph, &tree, &arcset),
        Cmd::Divergent { graph, restrict } => {
            commands::cmd_divergent(&graph, restrict.as_deref())
        }
        Cmd::Gen { n, m, seed, tree, out, format } => {
            let strategy = tree.map(|t| match t {
                Strategy::Bfs => "bfs",
                Strategy::Dfs => "dfs",
                Strategy::Random => "random",
            });
            commands::cmd_gen(n, m, seed, strategy, &out, matches!(format, Format::Dot))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            // verification reports are results and go to stdout;
            // diagnostics go to stderr
            if e.code() == 1 {
                println!("{e}");
            } else {
                eprintln!("error: {e}");
            }
            exit(e.code());
        }
    }
}
