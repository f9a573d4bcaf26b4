//! `mct`: command-line front end for mct-core.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mct_core::{Budget, Error};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "mct", version, about = "Exact computations for model structures on finite categories")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Out::Text)]
    pub out: Out,
    /// Seed for randomized suites; recorded in every report header.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Out {
    Text,
    Structured,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the category axioms of a category file.
    Validate { file: PathBuf },
    /// Check M1-M5 on the classes W, F, coF of a category file.
    ModelCheck { file: PathBuf },
    /// Decide whether `f` has the left lifting property against `g`.
    Lift { file: PathBuf, f: String, g: String },
    /// Homotopy 2-category.
    #[command(subcommand)]
    Ho(HoCmd),
    /// Connected components of the hom-categories of a 2-category file.
    Pi0 {
        file: PathBuf,
        /// Also compare functor counts below and above pi0 on the small targets.
        #[arg(long)]
        check: bool,
    },
    /// Chain complexes over F_p.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Simplicial sets.
    #[command(subcommand)]
    Sset(SsetCmd),
    /// Print a built-in fixture in its file format.
    Fixture { name: String },
}

#[derive(Args, Debug, Clone)]
pub struct HoInput {
    pub file: PathBuf,
    /// Build `H(C, Sigma)` for this class instead of Ho of the model structure.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Saturation round bound.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: u64,
}

#[derive(Subcommand, Debug)]
pub enum HoCmd {
    /// Saturate and print the presentation.
    Build {
        #[command(flatten)]
        input: HoInput,
        /// Print the merge log.
        #[arg(long)]
        log: bool,
        /// Write the 2-category to this file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// 2-cell classes `f => g`.
    Cells {
        f: String,
        g: String,
        #[command(flatten)]
        input: HoInput,
    },
    /// pi0 of the presentation.
    Pi0 {
        #[command(flatten)]
        input: HoInput,
    },
    /// Universal property of the localization against small targets.
    CheckLocalization {
        #[command(flatten)]
        input: HoInput,
        /// Restrict to one target, by name.
        #[arg(long)]
        target: Option<String>,
    },
    /// The localizing functor `q: C -> Ho` from the default replacements.
    Q {
        #[command(flatten)]
        input: HoInput,
        #[arg(long)]
        show_equivalences: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChainCmd {
    /// Homology dimensions of a complex.
    Homology { file: PathBuf },
    /// Model classes of a chain map, with both lifting criteria.
    Classify { file: PathBuf },
    /// Both factorizations of a chain map, recertified.
    Factor { file: PathBuf },
    /// Randomized comparison of the lifting criteria with degreewise tests.
    Oracle {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum SsetCmd {
    /// Nerve of a category file.
    Nerve {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
    },
    /// Barycentric subdivision. Category files are read through their nerve.
    Sd {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
    },
    /// `Ex(X)_n = Hom(Sd Delta^n, X)`.
    Ex {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
        /// Print every map.
        #[arg(long)]
        list: bool,
    },
    /// Bounded Kan condition for `X -> Delta^0`.
    Kan {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
    },
    /// Simplicial identities on the file's simplices.
    Check { file: PathBuf },
}

/// What a command produced: `ok` is false for a validated mathematical
/// failure.
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: serde_json::Value,
    pub dot: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let command = command.join(" ");
    let out = cli.global.out;
    let result = Budget::from_env().and_then(|b| commands::run(cli.cmd, &cli.global, &b));
    match result {
        Ok(r) => {
            let seed = cli.global.seed;
            let rendered = match out {
                Out::Text => format!("# mct {command}\n# seed {seed}\n{}", r.text),
                Out::Structured => {
                    let v = serde_json::json!({ "command": command, "seed": seed, "ok": r.ok, "report": r.json });
                    serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
                }
                Out::Dot => match &r.dot {
                    Some(d) => format!("// mct {command}\n// seed {seed}\n{d}"),
                    None => {
                        eprintln!("error: this command has no DOT output");
                        return ExitCode::from(2);
                    }
                },
            };
            // A closed pipe is not an error of the computation.
            let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input() {
        2
    } else {
        1
    }
}
