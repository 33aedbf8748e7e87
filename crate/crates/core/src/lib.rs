// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification of quantum programs modeled as quantum Markov chains.
//!
//! A program is a loop `while M[q] = 1 do q := E(q) od` over a
//! finite-dimensional state space: a termination measurement `{M₀, M₁}`, a
//! trace-preserving loop body `E` and an initial density operator `ρ₀`. The
//! crate computes
//!
//! - the terminal expectation `tr(P ρ*)` of an observable, by direct series
//!   summation, by an invariant `Q` with three side conditions, and by a
//!   closed form over the matrix representation of the loop,
//! - the average running time,
//! - exact and almost-sure termination, for one initial state or all of them.
//!
//! ```
//! use qmarkov::prelude::*;
//!
//! let p: f64 = 0.5;
//! let body = SuperOperator::new(vec![
//!     linalg::identity(2).scale(p.sqrt()),
//!     linalg::pauli_x().scale((1.0 - p).sqrt()),
//! ])?;
//! let scheme = ProgramScheme::new(body, TerminationMeasurement::computational(2, &[0]))?;
//! let rep = build_representation(&scheme)?;
//! let prog = scheme.with_initial_state(DensityOperator::basis(2, 1))?;
//! let t = average_running_time(&rep, prog.initial_state())?;
//! assert!((t.finite().unwrap() - 3.0).abs() < 1e-9);
//! # Ok::<(), qmarkov::Error>(())
//! ```

pub mod channel;
pub mod commands;
pub mod error;
pub mod golden;
pub mod invariant;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod program;
pub mod random;
pub mod report;
pub mod spectral;
pub mod termination;
pub mod tolerance;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channel::{positive_part_decompose, DensityOperator, Observable, SuperOperator};
    pub use crate::error::{Error, Result};
    pub use crate::invariant::{
        check_conditions, expectation_via_invariant, least_fixed_point_q, ConditionOptions,
        InvariantCertificate,
    };
    pub use crate::linalg::{self, c64, ComplexMatrix, ComplexVector, C64};
    pub use crate::model::{ModelFile, ModelOptions, RunOptions};
    pub use crate::oracle::{oracle_expectation, oracle_fixed_point};
    pub use crate::program::{
        step_probabilities, terminal_state_series, ProgramScheme, QuantumProgram,
        TerminationMeasurement,
    };
    pub use crate::spectral::{
        average_running_time, build_representation, expectation_closed_form, ProgramRepresentation,
        RunningTime,
    };
    pub use crate::termination::{
        check_program_termination, check_scheme_termination, TerminationVerdict,
    };
    pub use crate::tolerance::{IterationOptions, SeriesOptions, Tolerances};
}
