use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use operad_forge::cli::{self, Enumerate, Outcome};

#[derive(Parser)]
#[command(name = "operad-forge", version, about = "Exact computations with dg operads and modular operads over Q")]
struct Args {
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of an operad or Σ-module document.
    Validate { file: String },
    /// Homology dimensions per component.
    Homology { file: String },
    /// Free operad or free modular operad on a Σ-module document.
    #[command(group(ArgGroup::new("bound").required(true).args(["max_arity", "max_dim"])))]
    Free {
        file: String,
        #[arg(long)]
        max_arity: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Minimal model through level `--max`, with its tower.
    MinimalModel {
        file: String,
        #[arg(long)]
        max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Formality witness for the weight function of `--alpha`.
    CheckFormality {
        file: String,
        #[arg(long, default_value = "2")]
        alpha: String,
        #[arg(long)]
        max: usize,
    },
    /// List trees or stable graphs up to isomorphism.
    #[command(group(ArgGroup::new("what").required(true).args(["trees", "stable_graphs"])))]
    Enumerate {
        #[arg(long, value_name = "N")]
        trees: Option<usize>,
        #[arg(long, num_args = 2, value_names = ["G", "L"])]
        stable_graphs: Option<Vec<usize>>,
        /// Machine-readable listing.
        #[arg(long)]
        json: bool,
    },
    /// Check that Alt commutes with the cubical boundary.
    AltCheck {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_MALFORMED } else { cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let o: Outcome = match args.command {
        Command::Validate { file } => cli::cmd_validate(&file),
        Command::Homology { file } => cli::cmd_homology(&file),
        Command::Free { file, max_arity, max_dim } => cli::cmd_free(&file, max_arity, max_dim),
        Command::MinimalModel { file, max, seed } => cli::cmd_minimal_model(&file, max, seed),
        Command::CheckFormality { file, alpha, max } => cli::cmd_check_formality(&file, &alpha, max),
        Command::Enumerate { trees, stable_graphs, json } => {
            let what = match (trees, stable_graphs) {
                (Some(n), _) => Enumerate::Trees(n),
                (None, Some(gl)) => Enumerate::StableGraphs(gl[0], gl[1]),
                (None, None) => unreachable!("clap requires one"),
            };
            cli::cmd_enumerate(what, json)
        }
        Command::AltCheck { dim, trials, seed } => cli::cmd_alt_check(dim, trials, seed),
    };
    eprint!("{}", o.stderr);
    let written = match &args.out {
        Some(path) => std::fs::write(path, &o.stdout).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(o.stdout.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return ExitCode::from(cli::EXIT_FAILURE as u8);
    }
    ExitCode::from(o.code as u8)
}
