// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference values, computed straight from the definitions.
//!
//! Nothing here touches the matrix representation or the invariant machinery,
//! so these numbers can be used to check both.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityOperator, Observable};
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};
use crate::program::{step_probabilities, ProgramScheme, QuantumProgram, StepTrace};
use crate::spectral::RunningTime;
use crate::tolerance::{IterationOptions, SeriesOptions};

/// Number of leading steps kept in [`OracleResult::p_table`].
pub const P_TABLE_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `tr(P ρ*)` with `ρ*` summed until the non-termination mass drops below `tail_tol`.
    pub expectation_series: f64,
    /// `Σ n·pₙ` over the summed steps, or infinite when the residual mass is above `√tail_tol`.
    pub running_time_series: RunningTime,
    /// The first [`P_TABLE_LEN`] steps at most.
    pub p_table: StepTrace,
    pub tail_tol_used: f64,
    pub n_used: usize,
    /// Non-termination mass after the last summed step.
    pub residual: f64,
    pub terminal_state: DensityOperator,
}

/// Oracle summary that survives serialization (no step table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub expectation_series: f64,
    pub running_time_series: RunningTime,
    pub tail_tol_used: f64,
    pub n_used: usize,
    pub residual: f64,
}

impl OracleResult {
    pub fn summary(&self) -> OracleSummary {
        OracleSummary {
            expectation_series: self.expectation_series,
            running_time_series: self.running_time_series,
            tail_tol_used: self.tail_tol_used,
            n_used: self.n_used,
            residual: self.residual,
        }
    }

    /// Whether the series settled below `tail_tol`.
    pub fn converged(&self) -> bool {
        self.residual < self.tail_tol_used
    }
}

pub fn oracle_expectation(
    prog: &QuantumProgram,
    p: &Observable,
    opts: &SeriesOptions,
) -> Result<OracleResult> {
    linalg::require_dim(p.matrix(), prog.dim())?;
    if opts.tail_tol.is_nan() || opts.tail_tol <= 0.0 {
        return Err(Error::Model(format!(
            "tail_tol must be positive, got {}",
            opts.tail_tol
        )));
    }
    let scheme = prog.scheme();
    let mut state = prog.initial_state().matrix().clone();
    let mut acc = linalg::zeros(prog.dim());
    let mut mean = 0.0;
    let mut residual = state.trace().re;
    let mut n_used = 0;
    for n in 1..=opts.n_max.max(1) {
        let halted = scheme.halt_branch().apply_unchecked(&state);
        mean += n as f64 * halted.trace().re;
        acc += halted;
        state = scheme.step().apply_unchecked(&state);
        residual = state.trace().re;
        n_used = n;
        if residual < opts.tail_tol {
            break;
        }
    }
    let expectation = linalg::trace_product(p.matrix(), &acc).re;
    let running_time_series = if residual > opts.tail_tol.sqrt() {
        RunningTime::Infinite { weight: residual }
    } else {
        RunningTime::Finite(mean)
    };
    Ok(OracleResult {
        expectation_series: expectation,
        running_time_series,
        p_table: step_probabilities(prog, n_used.min(P_TABLE_LEN)),
        tail_tol_used: opts.tail_tol,
        n_used,
        residual,
        terminal_state: DensityOperator::from_matrix_unchecked(acc),
    })
}

/// `Q̄` by iterating `Q ↦ E*(M₀^† P M₀ + M₁^† Q M₁)` from zero, ten times
/// tighter and ten times longer than the verifier's defaults.
pub fn oracle_fixed_point(scheme: &ProgramScheme, p: &Observable) -> Result<Observable> {
    linalg::require_dim(p.matrix(), scheme.dim())?;
    if !p.is_positive() {
        return Err(Error::NotPositive {
            min_eigenvalue: linalg::min_eigenvalue(p.matrix()),
        });
    }
    let defaults = IterationOptions::default();
    let tol = defaults.tol / 10.0;
    let n_max = defaults.n_max.saturating_mul(10);
    let meas = scheme.measurement();
    let base = meas.m0().adjoint() * p.matrix() * meas.m0();
    let m1 = meas.m1();
    let body = scheme.body();
    let mut q = linalg::zeros(scheme.dim());
    for _ in 0..n_max {
        let completion = &base + m1.adjoint() * &q * m1;
        let next = body.apply_dual_unchecked(&completion);
        let delta = max_abs(&(&next - &q));
        q = next;
        if delta < tol {
            break;
        }
    }
    Ok(Observable::from_matrix_unchecked(linalg::hermitian_part(
        &q,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SuperOperator;
    use crate::linalg::{c64, identity, ket_bra, pauli_x};
    use crate::program::TerminationMeasurement;

    fn bit_flip_scheme(p: f64) -> ProgramScheme {
        let e = SuperOperator::new(vec![
            identity(2).scale(p.sqrt()),
            pauli_x().scale((1.0 - p).sqrt()),
        ])
        .unwrap();
        ProgramScheme::new(e, TerminationMeasurement::computational(2, &[0])).unwrap()
    }

    fn p0() -> Observable {
        Observable::new(ket_bra(2, 0, 0)).unwrap()
    }

    #[test]
    fn bit_flip_half_from_one() {
        let prog = bit_flip_scheme(0.5)
            .with_initial_state(DensityOperator::basis(2, 1))
            .unwrap();
        let r = oracle_expectation(&prog, &p0(), &SeriesOptions::default()).unwrap();
        assert!((r.expectation_series - 1.0).abs() < 1e-8);
        assert!((r.running_time_series.finite().unwrap() - 3.0).abs() < 1e-6);
        assert!(r.converged());
        assert_eq!(r.p_table.steps[0].p_n, 0.0);
        assert!((r.p_table.steps[1].p_n - 0.5).abs() < 1e-15);
    }

    #[test]
    fn m1_zero_is_one_step() {
        let meas = TerminationMeasurement::new(identity(2), linalg::zeros(2)).unwrap();
        let scheme =
            ProgramScheme::new(SuperOperator::new(vec![pauli_x()]).unwrap(), meas).unwrap();
        let rho = DensityOperator::pure(&[c64(0.6, 0.0), c64(0.8, 0.0)]).unwrap();
        let prog = scheme.with_initial_state(rho).unwrap();
        let r = oracle_expectation(&prog, &p0(), &SeriesOptions::default()).unwrap();
        assert_eq!(r.n_used, 1);
        assert!((r.expectation_series - 0.36).abs() < 1e-15);
        assert_eq!(r.running_time_series, RunningTime::Finite(1.0));
    }

    #[test]
    fn p1_superposition_reports_residual() {
        let rho = DensityOperator::pure(&[c64(0.6, 0.0), c64(0.8, 0.0)]).unwrap();
        let prog = bit_flip_scheme(1.0).with_initial_state(rho).unwrap();
        let opts = SeriesOptions {
            tail_tol: 1e-12,
            n_max: 1000,
        };
        let r = oracle_expectation(&prog, &p0(), &opts).unwrap();
        assert!((r.expectation_series - 0.36).abs() < 1e-12);
        assert!((r.residual - 0.64).abs() < 1e-12);
        assert!(matches!(
            r.running_time_series,
            RunningTime::Infinite { .. }
        ));
    }

    #[test]
    fn fixed_point_values() {
        let q = oracle_fixed_point(&bit_flip_scheme(0.5), &p0()).unwrap();
        assert!((q.matrix()[(1, 1)].re - 1.0).abs() < 1e-10);
        let q = oracle_fixed_point(&bit_flip_scheme(1.0), &p0()).unwrap();
        assert!(q.matrix()[(1, 1)].norm() < 1e-15);
        assert!((q.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_with_m1_zero() {
        let meas = TerminationMeasurement::new(identity(2), linalg::zeros(2)).unwrap();
        let body = SuperOperator::new(vec![pauli_x()]).unwrap();
        let scheme = ProgramScheme::new(body.clone(), meas).unwrap();
        let q = oracle_fixed_point(&scheme, &p0()).unwrap();
        let expected = body.apply_dual_to(p0().matrix()).unwrap();
        assert!(max_abs(&(q.matrix() - expected)) < 1e-15);
    }
}
