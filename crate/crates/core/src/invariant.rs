// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Invariant-based expectation: find a positive `Q` whose completion
//! `M₀^† P M₀ + M₁^† Q M₁` is invariant under the dual loop body, then read
//! the terminal expectation of `P` off the initial state.
//!
//! The three side conditions are
//! - finiteness of `⟨M₀^† P M₀ + M₁^† Q M₁⟩_{ρ₀}`,
//! - invariance `E*(M₀^† P M₀ + M₁^† Q M₁) = Q`,
//! - `Q`-termination `tr(Q E₁(Gⁿ(ρ₀))) → 0`.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityOperator, Observable};
use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs, unvectorize, vectorize, ComplexMatrix};
use crate::program::{terminal_state_from, ProgramScheme, QuantumProgram};
use crate::spectral::ProgramRepresentation;
use crate::tolerance::{IterationOptions, SeriesOptions};

/// A scheme with an optional initial state; lets the fixed-point
/// construction accept either.
pub trait SchemeSource {
    fn scheme(&self) -> &ProgramScheme;
    fn initial_state(&self) -> Option<&DensityOperator>;
}

impl SchemeSource for ProgramScheme {
    fn scheme(&self) -> &ProgramScheme {
        self
    }
    fn initial_state(&self) -> Option<&DensityOperator> {
        None
    }
}

impl SchemeSource for QuantumProgram {
    fn scheme(&self) -> &ProgramScheme {
        QuantumProgram::scheme(self)
    }
    fn initial_state(&self) -> Option<&DensityOperator> {
        Some(QuantumProgram::initial_state(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCertificate {
    pub p: Observable,
    pub q: Observable,
    /// `M₀^† P M₀ + M₁^† Q M₁`.
    pub completion: Observable,
    /// `||E*(completion) - Q||_max`.
    pub qv2_residual: f64,
    /// `⟨completion⟩_{ρ₀}` when an initial state was supplied.
    pub qv1_value: Option<f64>,
    /// `tr(Q E₁(Gⁿ(ρ₀)))` at `n = 0, 1, 2, 4, 8, ...` when an initial state was supplied.
    pub qv3_tail: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Every consecutive difference `Q_{n+1} - Q_n` checked was positive.
    pub monotone: bool,
    /// Built by the monotone iteration from zero (hence the least fixed point).
    pub least: bool,
}

fn completion_of(scheme: &ProgramScheme, p: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    let meas = scheme.measurement();
    let raw = meas.m0().adjoint() * p * meas.m0() + meas.m1().adjoint() * q * meas.m1();
    linalg::hermitian_part(&raw)
}

fn qv3_samples(
    scheme: &ProgramScheme,
    q: &ComplexMatrix,
    rho0: &ComplexMatrix,
    horizon: usize,
) -> Vec<f64> {
    let mut out = Vec::new();
    let mut state = rho0.clone();
    let mut next_sample = 0;
    for n in 0..=horizon {
        if n == next_sample {
            let running = scheme.continue_branch().apply_unchecked(&state);
            out.push(linalg::trace_product(q, &running).re);
            next_sample = if n == 0 { 1 } else { 2 * n };
        }
        state = scheme.step().apply_unchecked(&state);
    }
    out
}

/// Number of steps sampled into [`InvariantCertificate::qv3_tail`].
const QV3_SAMPLE_HORIZON: usize = 1 << 12;

impl InvariantCertificate {
    /// Wraps a user-supplied candidate `Q`; residuals are computed, nothing is asserted.
    pub fn from_candidate<S: SchemeSource>(
        src: &S,
        p: &Observable,
        q: &Observable,
    ) -> Result<Self> {
        let scheme = src.scheme();
        linalg::require_dim(p.matrix(), scheme.dim())?;
        linalg::require_dim(q.matrix(), scheme.dim())?;
        let completion = completion_of(scheme, p.matrix(), q.matrix());
        let image = scheme.body().apply_dual_unchecked(&completion);
        let qv2_residual = max_abs(&(image - q.matrix()));
        let (qv1_value, qv3_tail) = match src.initial_state() {
            Some(rho) => (
                Some(linalg::trace_product(&completion, rho.matrix()).re),
                qv3_samples(scheme, q.matrix(), rho.matrix(), QV3_SAMPLE_HORIZON),
            ),
            None => (None, Vec::new()),
        };
        Ok(Self {
            p: p.clone(),
            q: q.clone(),
            completion: Observable::from_matrix_unchecked(completion),
            qv2_residual,
            qv1_value,
            qv3_tail,
            iterations: 0,
            converged: true,
            monotone: true,
            least: false,
        })
    }
}

/// Iterations whose increments are checked for Löwner monotonicity.
const MONOTONE_CHECKS: usize = 1000;

/// Least fixed point of `Q = E*(M₀^† P M₀ + M₁^† Q M₁)` by the monotone
/// iteration `Q₀ = 0`, `Q_{n+1} = M₀^† P M₀ + M₁^† E*(Q_n) M₁`; the answer is
/// `E*(lim Q_n)`.
///
/// `p` must be positive. Non-convergence within `n_max` is reported through
/// `converged`, not as an error.
pub fn least_fixed_point_q<S: SchemeSource>(
    src: &S,
    p: &Observable,
    opts: &IterationOptions,
) -> Result<InvariantCertificate> {
    let scheme = src.scheme();
    linalg::require_dim(p.matrix(), scheme.dim())?;
    if !p.is_positive() {
        return Err(Error::NotPositive {
            min_eigenvalue: linalg::min_eigenvalue(p.matrix()),
        });
    }
    let d = scheme.dim();
    let meas = scheme.measurement();
    let base = meas.m0().adjoint() * p.matrix() * meas.m0();
    let m1 = meas.m1();
    let mut q = linalg::zeros(d);
    let mut iterations = 0;
    let mut converged = false;
    let mut monotone = true;
    while iterations < opts.n_max {
        let next = &base + m1.adjoint() * scheme.body().apply_dual_unchecked(&q) * m1;
        let diff = &next - &q;
        if iterations < MONOTONE_CHECKS && !linalg::is_positive_semidefinite(&diff, 1e-9)? {
            monotone = false;
        }
        let delta = max_abs(&diff);
        q = next;
        iterations += 1;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    let q_bar = linalg::hermitian_part(&scheme.body().apply_dual_unchecked(&q));
    let mut cert =
        InvariantCertificate::from_candidate(src, p, &Observable::from_matrix_unchecked(q_bar))?;
    cert.iterations = iterations;
    cert.converged = converged;
    cert.monotone = monotone;
    cert.least = true;
    Ok(cert)
}

/// Direct linear solve for the same fixed point; only valid when the spectral
/// radius of `M` is strictly inside the unit disc.
pub fn least_fixed_point_linear(
    scheme: &ProgramScheme,
    p: &Observable,
    rep: &ProgramRepresentation,
) -> Result<InvariantCertificate> {
    let radius = rep.spectral.spectral_radius();
    if radius >= 1.0 - rep.tolerances.eps_unit {
        return Err(Error::NotContracting { radius });
    }
    let d = scheme.dim();
    let meas = scheme.measurement();
    let base = meas.m0().adjoint() * p.matrix() * meas.m0();
    // Q ↦ M₁^† E*(Q) M₁ is represented by M^†.
    let system = identity(d * d) - rep.m.adjoint();
    let sol = linalg::solve(&system, &vectorize(&base)).ok_or(Error::SingularResolvent)?;
    let q_lim = unvectorize(&sol, d);
    let q_bar = linalg::hermitian_part(&scheme.body().apply_dual_unchecked(&q_lim));
    let mut cert =
        InvariantCertificate::from_candidate(scheme, p, &Observable::from_matrix_unchecked(q_bar))?;
    cert.least = true;
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Qv3Condition {
    pub holds: bool,
    /// `tr(Q E₁(Gⁿ(ρ₀)))` at the last evaluated step.
    pub tail: f64,
    pub horizon: usize,
    /// Largest unit-circle coefficient of the tail, when a representation was supplied.
    pub spectral_coefficient: Option<f64>,
    /// Iterative and spectral verdicts agree (true when no representation was supplied).
    pub consistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub qv1: Condition,
    pub qv2: Condition,
    pub qv3: Qv3Condition,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.qv1.holds && self.qv2.holds && self.qv3.holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionOptions {
    pub tol: f64,
    pub horizon: usize,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            horizon: 100_000,
        }
    }
}

/// Evaluates the three side conditions for `cert` on `prog`.
///
/// `Q`-termination is checked iteratively up to `opts.horizon`; with a
/// representation the unit-circle coefficients of the tail decide it exactly
/// and the iterative result is kept as a cross-check.
pub fn check_conditions(
    prog: &QuantumProgram,
    cert: &InvariantCertificate,
    opts: &ConditionOptions,
    rep: Option<&ProgramRepresentation>,
) -> Result<ConditionReport> {
    let scheme = prog.scheme();
    linalg::require_dim(cert.q.matrix(), scheme.dim())?;
    let rho0 = prog.initial_state().matrix();
    let qv1_value = linalg::trace_product(cert.completion.matrix(), rho0).re;
    let qv1 = Condition {
        holds: qv1_value.is_finite(),
        value: qv1_value,
    };
    let qv2 = Condition {
        holds: cert.qv2_residual <= opts.tol,
        value: cert.qv2_residual,
    };

    let q = cert.q.matrix();
    let q_norm = linalg::operator_norm(q);
    let mut state = rho0.clone();
    let mut tail = 0.0;
    let mut horizon = 0;
    let mut iterative = false;
    for n in 0..=opts.horizon {
        let running = scheme.continue_branch().apply_unchecked(&state);
        tail = linalg::trace_product(q, &running).re;
        horizon = n;
        // Non-termination mass is non-increasing, so ||Q|| * mass bounds every later term.
        if q_norm * running.trace().re < opts.tol {
            iterative = true;
            break;
        }
        state = scheme.body().apply_unchecked(&running);
    }
    if !iterative {
        iterative = tail.abs() < opts.tol;
    }

    let spectral_coefficient = rep.map(|rep| {
        let x = vectorize(rho0);
        let dual = scheme.continue_branch().apply_dual_unchecked(q);
        rep.spectral
            .unit_clusters()
            .map(|cid| {
                let part = unvectorize(&(rep.spectral.cluster_projector(cid) * &x), rep.dim);
                linalg::trace_product(&dual, &part).norm()
            })
            .fold(0.0_f64, f64::max)
    });
    let (holds, consistent) = match spectral_coefficient {
        Some(c) => {
            let spectral = c <= opts.tol;
            (spectral, spectral == iterative)
        }
        None => (iterative, true),
    };
    Ok(ConditionReport {
        qv1,
        qv2,
        qv3: Qv3Condition {
            holds,
            tail,
            horizon,
            spectral_coefficient,
            consistent,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationStatus {
    /// All three conditions hold.
    Certified,
    /// `Q`-termination fails but `Q` is the least fixed point, so the value is still exact.
    LeastFixedPoint,
    /// `Q`-termination fails for a non-least `Q`; the value need not be the terminal expectation.
    Unsound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantExpectation {
    pub value: f64,
    pub status: ExpectationStatus,
}

/// `tr((M₀^† P M₀ + M₁^† Q M₁) ρ₀)`; requires the invariance condition.
pub fn expectation_via_invariant(
    prog: &QuantumProgram,
    cert: &InvariantCertificate,
    conditions: &ConditionReport,
) -> Result<InvariantExpectation> {
    if !conditions.qv2.holds {
        return Err(Error::InvariantViolated {
            residual: cert.qv2_residual,
        });
    }
    let value = prog.initial_state().expectation(&cert.completion);
    let status = if conditions.qv3.holds {
        ExpectationStatus::Certified
    } else if cert.least {
        ExpectationStatus::LeastFixedPoint
    } else {
        ExpectationStatus::Unsound
    };
    Ok(InvariantExpectation { value, status })
}

/// `|⟨completion⟩_{ρ₀} - Σ_{k≤n} tr(P E₀(G^k(ρ₀))) - tr(Q E₁(Gⁿ(ρ₀)))|`.
pub fn partial_sum_residual(prog: &QuantumProgram, cert: &InvariantCertificate, n: usize) -> f64 {
    let scheme = prog.scheme();
    let rho0 = prog.initial_state().matrix();
    let lhs = linalg::trace_product(cert.completion.matrix(), rho0).re;
    let mut state = rho0.clone();
    let mut rhs = 0.0;
    for k in 0..=n {
        let halted = scheme.halt_branch().apply_unchecked(&state);
        rhs += linalg::trace_product(cert.p.matrix(), &halted).re;
        if k == n {
            let running = scheme.continue_branch().apply_unchecked(&state);
            rhs += linalg::trace_product(cert.q.matrix(), &running).re;
        } else {
            state = scheme.step().apply_unchecked(&state);
        }
    }
    (lhs - rhs).abs()
}

/// Terminal expectation of an arbitrary Hermitian observable through the
/// split `O = P₁ - P₂` into positive parts with orthogonal supports.
pub fn general_expectation(
    prog: &QuantumProgram,
    o: &Observable,
    opts: &IterationOptions,
) -> Result<f64> {
    linalg::require_dim(o.matrix(), prog.dim())?;
    let (pos, neg) = o.positive_parts();
    let rho0 = prog.initial_state();
    let mut value = 0.0;
    for (part, sign) in [(pos, 1.0), (neg, -1.0)] {
        if max_abs(part.matrix()) == 0.0 {
            continue;
        }
        let cert = least_fixed_point_q(prog, &part, opts)?;
        value += sign * rho0.expectation(&cert.completion);
    }
    Ok(value)
}

/// Largest violation of `tr(lim Q_n ρ) ≤ tr(P F(ρ))` over a spanning set of
/// density operators, with `F` evaluated by the series.
///
/// The iterate limit is recovered from the certificate as its completion,
/// since `Q_{n+1} = M₀^† P M₀ + M₁^† E*(Q_n) M₁`.
pub fn upper_bound_violation(
    scheme: &ProgramScheme,
    cert: &InvariantCertificate,
    series: &SeriesOptions,
) -> f64 {
    let d = scheme.dim();
    let mut worst = f64::NEG_INFINITY;
    for rho in probe_states(d) {
        let f_rho = terminal_state_from(scheme, rho.matrix(), series).rho_star;
        let bound = f_rho.expectation(&cert.p);
        let lhs = rho.expectation(&cert.completion);
        worst = worst.max(lhs - bound);
    }
    worst
}

/// Basis states plus `|i⟩ + |j⟩` and `|i⟩ + i|j⟩` superpositions; their span is every operator.
pub fn probe_states(d: usize) -> Vec<DensityOperator> {
    let mut out: Vec<DensityOperator> = (0..d).map(|i| DensityOperator::basis(d, i)).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            for phase in [linalg::c64(s, 0.0), linalg::c64(0.0, s)] {
                let mut psi = vec![linalg::c64(0.0, 0.0); d];
                psi[i] = linalg::c64(s, 0.0);
                psi[j] = phase;
                out.push(DensityOperator::from_matrix_unchecked(linalg::projector(
                    &psi,
                )));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SuperOperator;
    use crate::linalg::{c64, ket_bra, pauli_x};
    use crate::program::TerminationMeasurement;
    use crate::spectral::build_representation;

    fn bit_flip_scheme(p: f64) -> ProgramScheme {
        let e = SuperOperator::new(vec![
            identity(2).scale(p.sqrt()),
            pauli_x().scale((1.0 - p).sqrt()),
        ])
        .unwrap();
        ProgramScheme::new(e, TerminationMeasurement::computational(2, &[0])).unwrap()
    }

    fn program(p: f64, alpha: f64) -> QuantumProgram {
        let beta = (1.0 - alpha * alpha).sqrt();
        bit_flip_scheme(p)
            .with_initial_state(DensityOperator::pure(&[c64(alpha, 0.0), c64(beta, 0.0)]).unwrap())
            .unwrap()
    }

    fn p0() -> Observable {
        Observable::new(ket_bra(2, 0, 0)).unwrap()
    }

    #[test]
    fn bit_flip_completion_is_identity() {
        let cert = least_fixed_point_q(&bit_flip_scheme(0.5), &p0(), &IterationOptions::default())
            .unwrap();
        assert!(cert.converged && cert.monotone && cert.least);
        assert!(max_abs(&(cert.completion.matrix() - identity(2))) < 1e-11);
        assert!((cert.q.matrix()[(1, 1)].re - 1.0).abs() < 1e-11);
        assert!(cert.qv1_value.is_none());
    }

    #[test]
    fn bit_flip_p1_least_solution_is_zero() {
        let prog = program(1.0, 0.6);
        let cert = least_fixed_point_q(&prog, &p0(), &IterationOptions::default()).unwrap();
        assert!(cert.q.matrix()[(1, 1)].norm() < 1e-14);
        assert!(max_abs(&(cert.completion.matrix() - ket_bra(2, 0, 0))) < 1e-14);
        let rep = build_representation(prog.scheme()).unwrap();
        let cond =
            check_conditions(&prog, &cert, &ConditionOptions::default(), Some(&rep)).unwrap();
        assert!(cond.all_hold() && cond.qv3.consistent);
        let e = expectation_via_invariant(&prog, &cert, &cond).unwrap();
        assert!((e.value - 0.36).abs() < 1e-14);
        assert_eq!(e.status, ExpectationStatus::Certified);
    }

    #[test]
    fn non_least_candidate_fails_q_termination() {
        let prog = program(1.0, 0.6);
        let cert =
            InvariantCertificate::from_candidate(&prog, &p0(), &Observable::identity(2)).unwrap();
        assert!(cert.qv2_residual < 1e-15);
        let rep = build_representation(prog.scheme()).unwrap();
        let opts = ConditionOptions {
            tol: 1e-9,
            horizon: 1000,
        };
        let cond = check_conditions(&prog, &cert, &opts, Some(&rep)).unwrap();
        assert!(cond.qv2.holds);
        assert!(!cond.qv3.holds);
        assert!(cond.qv3.consistent);
        assert!((cond.qv3.tail - 0.64).abs() < 1e-12);
        assert!(cert.qv3_tail.iter().all(|t| (t - 0.64).abs() < 1e-12));
        let e = expectation_via_invariant(&prog, &cert, &cond).unwrap();
        assert_eq!(e.status, ExpectationStatus::Unsound);
        assert!((e.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn conditions_hold_for_terminating_case() {
        let prog = program(0.5, 0.6);
        let cert = least_fixed_point_q(&prog, &p0(), &IterationOptions::default()).unwrap();
        let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), None).unwrap();
        assert!(cond.all_hold());
        let e = expectation_via_invariant(&prog, &cert, &cond).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn ground_state_with_p1_terminates() {
        let prog = program(1.0, 1.0);
        let cert = least_fixed_point_q(&prog, &p0(), &IterationOptions::default()).unwrap();
        let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), None).unwrap();
        let e = expectation_via_invariant(&prog, &cert, &cond).unwrap();
        assert!((e.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_observable_is_trivial() {
        let prog = program(0.5, 0.6);
        let cert =
            least_fixed_point_q(&prog, &Observable::zero(2), &IterationOptions::default()).unwrap();
        assert_eq!(max_abs(cert.q.matrix()), 0.0);
        let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), None).unwrap();
        assert!(cond.all_hold());
        assert_eq!(cond.qv1.value, 0.0);
        assert_eq!(
            general_expectation(&prog, &Observable::zero(2), &IterationOptions::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn immediate_termination_one_iteration() {
        let meas = TerminationMeasurement::new(identity(2), linalg::zeros(2)).unwrap();
        let e = SuperOperator::new(vec![pauli_x()]).unwrap();
        let scheme = ProgramScheme::new(e, meas).unwrap();
        let p = Observable::new(ket_bra(2, 1, 1)).unwrap();
        let cert = least_fixed_point_q(&scheme, &p, &IterationOptions::default()).unwrap();
        // Q_1 = P and Q_2 = Q_1, so the loop stops after the second pass.
        assert!(cert.iterations <= 2);
        assert!(max_abs(&(cert.q.matrix() - ket_bra(2, 0, 0))) < 1e-15);
        assert!(max_abs(&(cert.completion.matrix() - p.matrix())) < 1e-15);
    }

    #[test]
    fn partial_sum_base_case_is_exact() {
        let prog = program(0.5, 0.6);
        let cert = least_fixed_point_q(&prog, &p0(), &IterationOptions::default()).unwrap();
        assert!(partial_sum_residual(&prog, &cert, 0) < 1e-15);
        for n in 1..=10 {
            assert!(partial_sum_residual(&prog, &cert, n) < 1e-9);
        }
    }

    #[test]
    fn linear_path_matches_iteration() {
        let scheme = bit_flip_scheme(0.3);
        let rep = build_representation(&scheme).unwrap();
        let a = least_fixed_point_q(&scheme, &p0(), &IterationOptions::default()).unwrap();
        let b = least_fixed_point_linear(&scheme, &p0(), &rep).unwrap();
        assert!(max_abs(&(a.q.matrix() - b.q.matrix())) < 1e-11);

        let unit = bit_flip_scheme(1.0);
        let rep = build_representation(&unit).unwrap();
        assert!(matches!(
            least_fixed_point_linear(&unit, &p0(), &rep),
            Err(Error::NotContracting { .. })
        ));
    }

    #[test]
    fn rejects_indefinite_observable() {
        let z = Observable::new(linalg::pauli_z()).unwrap();
        assert!(matches!(
            least_fixed_point_q(&bit_flip_scheme(0.5), &z, &IterationOptions::default()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn probe_states_are_valid() {
        for rho in probe_states(3) {
            assert!((rho.trace() - 1.0).abs() < 1e-14);
        }
        assert_eq!(probe_states(3).len(), 9);
    }
}
