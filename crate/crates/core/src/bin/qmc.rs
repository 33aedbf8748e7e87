// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! `qmc`: command-line front end over [`qmarkov::commands`].

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmarkov::commands::{self, Failure, Method};
use qmarkov::golden;
use qmarkov::model::{ModelFile, ModelOptions};
use qmarkov::report::{Scope, VerificationReport, EXIT_ERROR, EXIT_VALIDATION};

#[derive(Parser)]
#[command(
    name = "qmc",
    version,
    about = "Verify quantum while-loops modeled as quantum Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model file (JSON).
    model: PathBuf,
    /// Write the machine-readable report here.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Stop summing once the non-termination mass drops below this.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Step / iteration budget.
    #[arg(long)]
    n_max: Option<usize>,
    /// Distance from the unit circle below which an eigenvalue counts as unit-modulus.
    #[arg(long)]
    eps_unit: Option<f64>,
    /// Largest allowed difference between methods.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn overrides(&self) -> ModelOptions {
        ModelOptions {
            tail_tol: self.tail_tol,
            n_max: self.n_max,
            eps_unit: self.eps_unit,
            tol: self.tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Terminal expectation of an observable.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        observable: String,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
    },
    /// Average running time.
    Runtime {
        #[command(flatten)]
        common: Common,
    },
    /// Exact and almost-sure termination.
    Terminate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "program")]
        scope: Scope,
    },
    /// Eigenvalues of the matrix representation.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Step-probability table.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Recompute the golden reference file.
    RegenGoldens {
        /// Output file.
        #[arg(long, default_value = "goldens/oracle.json")]
        out: PathBuf,
        /// Extra models to include, each checked against observable `--observable`.
        #[arg(long)]
        model: Vec<PathBuf>,
        #[arg(long, default_value = "P0")]
        observable: String,
    },
}

fn run_report(
    common: &Common,
    f: impl FnOnce(&ModelFile, &ModelOptions) -> Result<VerificationReport, Failure>,
) -> ExitCode {
    let model = match ModelFile::load(&common.model) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_VALIDATION, &e.to_string()),
    };
    match f(&model, &common.overrides()) {
        Ok(report) => {
            println!("{report}");
            if let Some(path) = &common.json_out {
                if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
                    return fail(EXIT_ERROR, &format!("cannot write {}: {e}", path.display()));
                }
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(failure) => fail(failure.code, &failure.message),
    }
}

fn fail(code: i32, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code as u8)
}

fn regen(out: &Path, models: &[PathBuf], observable: &str) -> ExitCode {
    let mut extra = Vec::new();
    for path in models {
        match ModelFile::load(path) {
            Ok(m) => {
                let name = path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                );
                extra.push((name, m, observable.to_string()));
            }
            Err(e) => return fail(EXIT_VALIDATION, &e.to_string()),
        }
    }
    let file = match golden::regenerate(&extra) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_ERROR, &e.to_string()),
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return fail(EXIT_ERROR, &format!("cannot create {}: {e}", dir.display()));
        }
    }
    if let Err(e) = file.save(out) {
        return fail(EXIT_ERROR, &e.to_string());
    }
    println!("wrote {} records to {}", file.records.len(), out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            common,
            observable,
            method,
        } => run_report(&common, |m, o| commands::verify(m, &observable, method, o)),
        Command::Runtime { common } => run_report(&common, commands::runtime),
        Command::Terminate { common, scope } => {
            run_report(&common, |m, o| commands::terminate(m, scope, o))
        }
        Command::Spectrum { common } => run_report(&common, commands::spectrum),
        Command::Simulate { common, steps } => {
            run_report(&common, |m, o| commands::simulate(m, steps, o))
        }
        Command::RegenGoldens {
            out,
            model,
            observable,
        } => regen(&out, &model, &observable),
    }
}
