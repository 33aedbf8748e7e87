// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command drivers behind the `qmc` binary. Each takes a parsed model and
//! returns a [`VerificationReport`], or a [`Failure`] when the input is
//! rejected before any analysis runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::Observable;
use crate::error::Error;
use crate::invariant::{
    check_conditions, expectation_via_invariant, least_fixed_point_q, ConditionOptions,
};
use crate::linalg::{self, max_abs};
use crate::model::{ModelFile, ModelOptions, RunOptions};
use crate::oracle::oracle_expectation;
use crate::program::{step_probabilities, terminal_state_series, QuantumProgram};
use crate::report::*;
use crate::spectral::{
    average_running_time, build_representation_with, expectation_closed_form,
    ProgramRepresentation, RunningTime,
};
use crate::termination::{check_program_termination, check_scheme_termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Invariant,
    Spectral,
    All,
}

impl Method {
    pub fn tags(self) -> Vec<MethodTag> {
        match self {
            Method::Series => vec![MethodTag::Series],
            Method::Invariant => vec![MethodTag::Invariant],
            Method::Spectral => vec![MethodTag::Spectral],
            Method::All => vec![MethodTag::Series, MethodTag::Invariant, MethodTag::Spectral],
        }
    }
}

/// Rejected input or a failed analysis with no report to show.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn validation(e: Error) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: e.to_string(),
    }
}

fn runtime_error(e: Error) -> Failure {
    Failure {
        code: EXIT_ERROR,
        message: e.to_string(),
    }
}

struct Loaded {
    options: RunOptions,
    report: VerificationReport,
}

fn load(command: &str, model: &ModelFile, overrides: &ModelOptions) -> Result<Loaded, Failure> {
    let options = model.run_options(overrides).map_err(validation)?;
    let report = VerificationReport::new(command, model.hash(), options);
    Ok(Loaded { options, report })
}

fn program(model: &ModelFile, options: &RunOptions) -> Result<QuantumProgram, Failure> {
    model.program(&options.tolerances).map_err(validation)
}

/// Representation failures mean the input is not a valid program.
fn representation(
    prog_scheme: &crate::program::ProgramScheme,
    options: &RunOptions,
) -> Result<ProgramRepresentation, Failure> {
    build_representation_with(prog_scheme, &options.tolerances).map_err(validation)
}

const QV3_MESSAGE: &str = "program does not almost-terminate, so Q-termination (QV3) fails";

/// Expectation of a named observable by one or all methods.
pub fn verify(
    model: &ModelFile,
    observable: &str,
    method: Method,
    overrides: &ModelOptions,
) -> Result<VerificationReport, Failure> {
    let Loaded {
        options,
        mut report,
    } = load("verify", model, overrides)?;
    report.observable = Some(observable.to_string());
    let prog = program(model, &options)?;
    let p = model
        .observable(observable, &options.tolerances)
        .map_err(validation)?;
    let rep = representation(prog.scheme(), &options)?;
    let verdict = check_program_termination(&rep, prog.initial_state()).map_err(runtime_error)?;
    report.termination = Some(TerminationEntry {
        scope: Scope::Program,
        verdict,
        tolerance: options.tolerances.zero_vec,
    });
    let tol = options.agreement_tol;

    for tag in method.tags() {
        match tag {
            MethodTag::Series => {
                let s = terminal_state_series(&prog, &options.series);
                let value = s.rho_star.expectation(&p);
                if !verdict.almost_terminates {
                    report.fail(
                        EXIT_NONTERMINATION,
                        format!(
                            "series: {QV3_MESSAGE}; residual mass {:.3e} never vanishes",
                            s.residual
                        ),
                    );
                } else if !s.converged {
                    report.warnings.push(format!(
                        "series: truncated at n_max = {} with residual {:.3e}",
                        options.series.n_max, s.residual
                    ));
                }
                report.expectations.push(MethodValue {
                    method: tag,
                    value,
                    tolerance: options.series.tail_tol,
                    diagnostics: Diagnostics {
                        n_used: Some(s.n_used),
                        residual: Some(s.residual),
                        converged: Some(s.converged),
                        ..Default::default()
                    },
                });
            }
            MethodTag::Invariant => match invariant_value(&prog, &p, &rep, &options, &mut report) {
                Ok(entry) => report.expectations.push(entry),
                Err(e) => report.fail(EXIT_ERROR, format!("invariant: {e}")),
            },
            MethodTag::Spectral => {
                let value = expectation_closed_form(&rep, prog.initial_state(), &p)
                    .map_err(runtime_error)?;
                if !verdict.almost_terminates {
                    report.warnings.push(format!(
                        "spectral: program is not almost-terminating (unit overlap {:.3e}); value is the expectation over halting runs only",
                        verdict.unit_overlap_norm
                    ));
                }
                report.expectations.push(MethodValue {
                    method: tag,
                    value,
                    tolerance: options.tolerances.num,
                    diagnostics: Diagnostics {
                        margin: Some(rep.margin),
                        unit_overlap: Some(verdict.unit_overlap_norm),
                        ..Default::default()
                    },
                });
            }
        }
    }

    let values = report.expectations.clone();
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let delta = (a.value - b.value).abs();
            let agree = delta <= tol;
            if !agree {
                report.fail(
                    EXIT_DISAGREEMENT,
                    format!(
                        "{} and {} differ by {delta:.3e} > {tol:.1e}",
                        a.method, b.method
                    ),
                );
            }
            report.deltas.push(PairDelta {
                first: a.method,
                second: b.method,
                delta,
                tolerance: tol,
                agree,
            });
        }
    }
    Ok(report)
}

/// Least fixed point for each positive part of `p`, with the three conditions.
fn invariant_value(
    prog: &QuantumProgram,
    p: &Observable,
    rep: &ProgramRepresentation,
    options: &RunOptions,
    report: &mut VerificationReport,
) -> crate::Result<MethodValue> {
    let (pos, neg) = p.positive_parts();
    let cond_opts = ConditionOptions {
        tol: options.tolerances.num,
        ..ConditionOptions::default()
    };
    let mut value = 0.0;
    let mut diag = Diagnostics {
        iterations: Some(0),
        converged: Some(true),
        ..Default::default()
    };
    let (mut qv1, mut qv2, mut qv3) = (true, true, true);
    let mut status = crate::invariant::ExpectationStatus::Certified;
    for (name, part, sign) in [("positive", pos, 1.0), ("negative", neg, -1.0)] {
        if max_abs(part.matrix()) == 0.0 {
            continue;
        }
        let cert = least_fixed_point_q(prog, &part, &options.iteration)?;
        let cond = check_conditions(prog, &cert, &cond_opts, Some(rep))?;
        diag.iterations = Some(diag.iterations.unwrap_or(0) + cert.iterations);
        diag.converged = Some(diag.converged.unwrap_or(true) && cert.converged);
        qv1 &= cond.qv1.holds;
        qv2 &= cond.qv2.holds;
        qv3 &= cond.qv3.holds;
        if !cond.qv3.consistent {
            report.warnings.push(format!(
                "invariant ({name}): iterative Q-termination check disagrees with the spectral one after {} steps",
                cond.qv3.horizon
            ));
        }
        report.conditions.push(ConditionEntry {
            part: name.to_string(),
            report: cond,
        });
        let e = expectation_via_invariant(prog, &cert, &cond)?;
        if e.status != crate::invariant::ExpectationStatus::Certified {
            status = e.status;
        }
        value += sign * e.value;
    }
    if !qv3 {
        report.fail(
            EXIT_NONTERMINATION,
            "invariant: Q-termination (QV3) fails for the least fixed point".to_string(),
        );
    }
    if diag.converged == Some(false) {
        report.warnings.push(format!(
            "invariant: fixed-point iteration stopped at n_max = {} before reaching tol {:.1e}",
            options.iteration.n_max, options.iteration.tol
        ));
    }
    diag.qv1 = Some(qv1);
    diag.qv2 = Some(qv2);
    diag.qv3 = Some(qv3);
    diag.status = Some(status);
    Ok(MethodValue {
        method: MethodTag::Invariant,
        value,
        tolerance: options.iteration.tol,
        diagnostics: diag,
    })
}

/// Mean running time by the closed form and by summing `n·pₙ`.
pub fn runtime(model: &ModelFile, overrides: &ModelOptions) -> Result<VerificationReport, Failure> {
    let Loaded {
        options,
        mut report,
    } = load("runtime", model, overrides)?;
    let prog = program(model, &options)?;
    let rep = representation(prog.scheme(), &options)?;
    let verdict = check_program_termination(&rep, prog.initial_state()).map_err(runtime_error)?;
    report.termination = Some(TerminationEntry {
        scope: Scope::Program,
        verdict,
        tolerance: options.tolerances.zero_vec,
    });

    let spectral = average_running_time(&rep, prog.initial_state()).map_err(runtime_error)?;
    let identity = Observable::identity(prog.dim());
    let series = oracle_expectation(&prog, &identity, &options.series).map_err(runtime_error)?;
    let tol = options.agreement_tol;
    report.running_times.push(RunningTimeEntry {
        method: MethodTag::Spectral,
        value: spectral,
        tolerance: options.tolerances.num,
    });
    report.running_times.push(RunningTimeEntry {
        method: MethodTag::Series,
        value: series.running_time_series,
        tolerance: options.series.tail_tol,
    });
    if let RunningTime::Infinite {
        weight: unit_overlap,
    } = spectral
    {
        report.warnings.push(format!(
            "halting probability is below one (unit overlap {unit_overlap:.3e}), so the mean running time diverges"
        ));
    }
    match (spectral, series.running_time_series) {
        (RunningTime::Finite(a), RunningTime::Finite(b)) => {
            let delta = (a - b).abs();
            let agree = delta <= tol * a.abs().max(1.0);
            if !agree {
                report.fail(
                    EXIT_DISAGREEMENT,
                    format!("spectral and series running times differ by {delta:.3e}"),
                );
            }
            report.deltas.push(PairDelta {
                first: MethodTag::Spectral,
                second: MethodTag::Series,
                delta,
                tolerance: tol,
                agree,
            });
        }
        (RunningTime::Infinite { .. }, RunningTime::Infinite { .. }) => {}
        (a, b) => report.fail(
            EXIT_DISAGREEMENT,
            format!("spectral running time {a} but series running time {b}"),
        ),
    }
    Ok(report)
}

/// Exact and almost-sure termination of the program or of the whole scheme.
pub fn terminate(
    model: &ModelFile,
    scope: Scope,
    overrides: &ModelOptions,
) -> Result<VerificationReport, Failure> {
    let Loaded {
        options,
        mut report,
    } = load("terminate", model, overrides)?;
    let scheme = model.scheme(&options.tolerances).map_err(validation)?;
    let rep = representation(&scheme, &options)?;
    let verdict = match scope {
        Scope::Program => {
            let rho0 = model
                .initial_state(&options.tolerances)
                .map_err(validation)?;
            check_program_termination(&rep, &rho0)
        }
        Scope::Scheme => check_scheme_termination(&rep),
    }
    .map_err(runtime_error)?;
    if !verdict.almost_terminates {
        report.fail(
            EXIT_NONTERMINATION,
            format!(
                "not almost terminating: unit-circle overlap {:.3e}",
                verdict.unit_overlap_norm
            ),
        );
    }
    report.termination = Some(TerminationEntry {
        scope,
        verdict,
        tolerance: options.tolerances.zero_vec,
    });
    Ok(report)
}

/// Eigenvalues of the matrix representation with unit-circle flags.
pub fn spectrum(
    model: &ModelFile,
    overrides: &ModelOptions,
) -> Result<VerificationReport, Failure> {
    let Loaded {
        options,
        mut report,
    } = load("spectrum", model, overrides)?;
    let scheme = model.scheme(&options.tolerances).map_err(validation)?;
    let rep = representation(&scheme, &options)?;
    report.spectrum = Some(SpectrumSummary::from_representation(&rep));
    Ok(report)
}

/// Step-by-step halting probabilities.
pub fn simulate(
    model: &ModelFile,
    steps: usize,
    overrides: &ModelOptions,
) -> Result<VerificationReport, Failure> {
    let Loaded {
        options,
        mut report,
    } = load("simulate", model, overrides)?;
    let prog = program(model, &options)?;
    let trace = step_probabilities(&prog, steps);
    report.steps = trace
        .steps
        .iter()
        .map(|s| StepRow {
            n: s.n,
            p_n: s.p_n,
            p_n_nontermination: s.p_n_nontermination,
        })
        .collect();
    let halted = trace.halting_probability();
    let total = halted + trace.residual_mass;
    if (total - linalg::trace(prog.initial_state().matrix()).re).abs() > options.tolerances.tp {
        report.fail(
            EXIT_ERROR,
            format!("probability not conserved: halted + running = {total}"),
        );
    }
    Ok(report)
}
