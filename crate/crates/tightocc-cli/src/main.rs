mod commands;
mod generate;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Classify, Failure, Run};

#[derive(Parser, Debug)]
#[command(name = "tightocc", version, about = "Tight odd cycle cut tools for odd cycle transversal")]
struct Cli {
    /// Write the run document as JSON to this file, or to stdout with `-`
    /// (which replaces the table).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Include wall clock timings in the document and the table.
    #[arg(long, global = true)]
    with_timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimum odd cycle transversal.
    Oct {
        graph: PathBuf,
        /// Only look for solutions of at most this size.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = OctMethod::Compress)]
        method: OctMethod,
    },
    /// Search for a reducible odd cycle cut with at most `2k` heads.
    FindOcc {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        threshold: Threshold,
    },
    /// Shrink the bipartite part of an odd cycle cut.
    Reduce {
        graph: PathBuf,
        #[arg(long)]
        occ: PathBuf,
        /// Write `<prefix>.gr` and `<prefix>.map`.
        #[arg(short = 'o', value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Extract a tight odd cycle cut from a vertex and edge coloring.
    Extract {
        graph: PathBuf,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Reduce, then search for `k` vertices of a minimum odd cycle transversal.
    Pipeline {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        z: usize,
        #[command(flatten)]
        threshold: Threshold,
        /// Coloring or OCC file used instead of the coloring family.
        #[arg(long)]
        hint: Option<PathBuf>,
        #[command(flatten)]
        search: Search,
    },
    /// Check an odd cycle cut, and its tightness when an order is known.
    Validate {
        graph: PathBuf,
        #[arg(long)]
        occ: PathBuf,
        /// Order to check the certificate against; overrides `z:` in the file.
        #[arg(long)]
        z: Option<usize>,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run the pipeline on every `.gr` file of a directory.
    Bench {
        corpus: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        z: usize,
        #[command(flatten)]
        threshold: Threshold,
        #[command(flatten)]
        search: Search,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OctMethod {
    Brute,
    Compress,
}

#[derive(Args, Debug, Clone)]
pub struct Threshold {
    /// Reducibility threshold: `paper` or `custom:<c0>,<c1>,...`.
    #[arg(long, value_name = "MODE")]
    pub gr: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Search {
    /// Concurrent coloring trials.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Give up, inconclusively, after this many colorings.
    #[arg(long)]
    pub max_colorings: Option<u128>,
}

#[derive(Args, Debug, Clone)]
pub struct GenOut {
    #[arg(long)]
    pub seed: u64,
    /// Output prefix; files are named `<prefix>.gr`, `<prefix>.occ`, ...
    #[arg(short = 'o', value_name = "PREFIX")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Planted tight odd cycle cut of width `k` and order `z`.
    Planted {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        z: usize,
        #[arg(long, default_value_t = 3)]
        cycle_min: usize,
        #[arg(long, default_value_t = 3)]
        cycle_max: usize,
        #[arg(long, default_value_t = 0)]
        rest_n: usize,
        #[arg(long, default_value_t = 0.0)]
        rest_p: f64,
        #[arg(long, default_value_t = 0.0)]
        attach_p: f64,
        #[arg(long, default_value_t = 0)]
        noise: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Triangle gadget graph of a 3-CNF formula.
    Sat {
        /// DIMACS CNF input; a random formula is drawn without it.
        #[arg(long, conflicts_with_all = ["vars", "clauses"])]
        cnf: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        clauses: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Gadget graph of a random multicolored clique instance.
    Mcc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Random graph `G(n, p)`.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        out: GenOut,
    },
}

fn dispatch(command: &Command, timings: bool) -> Result<Run, Failure> {
    match command {
        Command::Oct { graph, k, method } => commands::oct(graph, *k, *method),
        Command::FindOcc { graph, k, threshold } => commands::find_occ(graph, *k, threshold),
        Command::Reduce { graph, occ, out } => commands::reduce(graph, occ, out.as_deref()),
        Command::Extract { graph, z, coloring } => commands::extract(graph, *z, coloring),
        Command::Pipeline { graph, k, z, threshold, hint, search } => {
            commands::pipeline(graph, *k, *z, threshold, hint.as_deref(), search, timings)
        }
        Command::Validate { graph, occ, z } => commands::validate(graph, occ, *z),
        Command::Gen { kind } => generate::run(kind),
        Command::Bench { corpus, k, z, threshold, search } => {
            commands::bench(corpus, *k, *z, threshold, search, timings)
        }
    }
}

fn emit(cli: &Cli, run: &Run) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(&run.doc).expect("documents serialize") + "\n";
    let to_stdout = cli.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    let mut stdout = std::io::stdout().lock();
    if to_stdout {
        stdout.write_all(json.as_bytes()).input("writing to stdout")?;
    } else {
        stdout.write_all(run.table.render().as_bytes()).input("writing to stdout")?;
        stdout.write_all(run.trailer.as_bytes()).input("writing to stdout")?;
        if let Some(path) = &cli.json {
            std::fs::write(path, json).input(format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli.command, cli.with_timings).and_then(|mut run| {
        if !cli.with_timings {
            run.doc.timings = None;
        }
        emit(&cli, &run).map(|()| run.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
