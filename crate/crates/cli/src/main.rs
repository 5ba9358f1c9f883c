//! `e6v`: command-line front end for the verification toolkit.
//!
//! Subcommands: `verify` runs named checks from the registry (default:
//! all of them); `twist` builds the six twisted forms at one explicit
//! twist; `form` prints an untwisted form with its character components;
//! `sw` prints the mod-2 class tables; `graph`, `lattice`, and `group`
//! export machine-readable descriptions.
//!
//! Exit codes: 0 all requested work passed, 1 at least one verification
//! failed, 2 usage error. `--json` emits a single JSON document on
//! standard output; progress logs go to standard error.

mod checks;
mod context;
mod export;
mod inspect;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "e6v", version, about = "Verification toolkit for the 27-line lattice, its reflection group, and the attached quadratic forms", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks from the registry.
    Verify {
        /// Check names to run; `all` (or nothing) selects every check.
        names: Vec<String>,
        /// Additional check name (repeatable).
        #[arg(long = "check")]
        check: Vec<String>,
        /// Number of random twists per randomized check.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Seed for the deterministic twist sequence.
        #[arg(long = "rng-seed", default_value_t = 0)]
        rng_seed: u64,
        /// Emit one JSON document on stdout instead of a table.
        #[arg(long)]
        json: bool,
        /// Include wall-clock durations in the report (off by default so
        /// identical runs are byte-identical).
        #[arg(long)]
        timings: bool,
    },
    /// Build the twisted forms at one explicit twist.
    Twist {
        /// Four square classes, comma separated (example: -1,2,3,5).
        #[arg(long, allow_hyphen_values = true)]
        classes: String,
        /// Which form to print.
        #[arg(long, value_enum, default_value_t = FormName::Q27)]
        form: FormName,
        /// Also build the registry's closed-form expression for this form
        /// and report whether the two sides are isometric.
        #[arg(long)]
        compare: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print an untwisted form and its character components.
    Form {
        /// Which form to print.
        #[arg(value_enum)]
        form: FormName,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the mod-2 characteristic-class tables.
    Sw {
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Export the 27-vertex line graph.
    Graph(ExportArgs),
    /// Export the lattice data (roots, lines, Gram matrix).
    Lattice(ExportArgs),
    /// Export the reflection-group summary.
    Group(ExportArgs),
}

#[derive(clap::Args)]
struct ExportArgs {
    /// Output format (`dot` is only valid for `graph`).
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    format: ExportFormat,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
enum FormName {
    Q4,
    Q5,
    Q6,
    Q7,
    Q27,
    Q45,
}

impl FormName {
    fn as_str(self) -> &'static str {
        match self {
            FormName::Q4 => "q4",
            FormName::Q5 => "q5",
            FormName::Q6 => "q6",
            FormName::Q7 => "q7",
            FormName::Q27 => "q27",
            FormName::Q45 => "q45",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            names,
            check,
            trials,
            rng_seed,
            json,
            timings,
        } => {
            let mut requested: Vec<String> = names;
            requested.extend(check);
            checks::run_verify(&requested, trials, rng_seed, json, timings)
        }
        Command::Twist {
            classes,
            form,
            compare,
            json,
        } => inspect::run_twist(&classes, form, compare, json),
        Command::Form { form, json } => inspect::run_form(form, json),
        Command::Sw { json } => inspect::run_sw(json),
        Command::Graph(args) => export::run_export(export::ExportKind::Graph, &args),
        Command::Lattice(args) => export::run_export(export::ExportKind::Lattice, &args),
        Command::Group(args) => export::run_export(export::ExportKind::Group, &args),
    }
}
