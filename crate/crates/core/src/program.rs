// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum Markov chain programs with a yes/no termination test.
//!
//! One step of a program applies the termination measurement `{M₀, M₁}` to
//! the current (partial) state; outcome 0 halts, outcome 1 runs the loop body
//! `E` and repeats. With `E_i(ρ) = M_i ρ M_i^†` and `G = E ∘ E₁` the terminal
//! state is `ρ* = Σ_n E₀(Gⁿ(ρ₀))`.

use crate::channel::{DensityOperator, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs, require_dim, require_square, ComplexMatrix};
use crate::tolerance::{SeriesOptions, Tolerances};

/// Two-outcome measurement `{M₀, M₁}`; outcome 0 terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminationMeasurement {
    m0: ComplexMatrix,
    m1: ComplexMatrix,
}

impl TerminationMeasurement {
    pub fn new(m0: ComplexMatrix, m1: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m0, m1, &Tolerances::default())
    }

    pub fn with_tolerances(m0: ComplexMatrix, m1: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let d = require_square(&m0)?;
        require_dim(&m1, d)?;
        if !linalg::is_finite(&m0) || !linalg::is_finite(&m1) {
            return Err(Error::NonFinite);
        }
        let completeness = m0.adjoint() * &m0 + m1.adjoint() * &m1 - identity(d);
        let deviation = max_abs(&completeness);
        if deviation > tol.tp {
            return Err(Error::IncompleteMeasurement { deviation });
        }
        Ok(Self { m0, m1 })
    }

    /// Projective measurement onto `|k⟩⟨k|` for `k ∈ halting` (outcome 0) and the rest.
    pub fn computational(d: usize, halting: &[usize]) -> Self {
        let mut m0 = linalg::zeros(d);
        for &k in halting {
            m0[(k, k)] = linalg::c64(1.0, 0.0);
        }
        let m1 = identity(d) - &m0;
        Self { m0, m1 }
    }

    pub fn dim(&self) -> usize {
        self.m0.nrows()
    }

    pub fn m0(&self) -> &ComplexMatrix {
        &self.m0
    }

    pub fn m1(&self) -> &ComplexMatrix {
        &self.m1
    }
}

/// Loop body plus termination test; feeding an initial state yields a
/// [`QuantumProgram`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramScheme {
    e: SuperOperator,
    meas: TerminationMeasurement,
    e0: SuperOperator,
    e1: SuperOperator,
    g: SuperOperator,
}

impl ProgramScheme {
    pub fn new(e: SuperOperator, meas: TerminationMeasurement) -> Result<Self> {
        Self::with_tolerances(e, meas, &Tolerances::default())
    }

    pub fn with_tolerances(
        e: SuperOperator,
        meas: TerminationMeasurement,
        tol: &Tolerances,
    ) -> Result<Self> {
        if e.dim() != meas.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                found: meas.dim(),
            });
        }
        let deviation = max_abs(&(e.kraus_gram() - identity(e.dim())));
        if deviation > tol.tp {
            return Err(Error::NotTracePreserving { deviation });
        }
        let e0 = SuperOperator::conjugation(meas.m0.clone())?;
        let e1 = SuperOperator::conjugation(meas.m1.clone())?;
        let g = e.compose(&e1)?;
        let scheme = Self { e, meas, e0, e1, g };
        let deviation = scheme.halting_split_deviation();
        if deviation > 10.0 * tol.tp {
            return Err(Error::Inconsistent(format!(
                "G + E0 is not trace-preserving (deviation {deviation:.3e})"
            )));
        }
        Ok(scheme)
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    /// Loop body `E`.
    pub fn body(&self) -> &SuperOperator {
        &self.e
    }

    pub fn measurement(&self) -> &TerminationMeasurement {
        &self.meas
    }

    /// `E₀(ρ) = M₀ ρ M₀^†`.
    pub fn halt_branch(&self) -> &SuperOperator {
        &self.e0
    }

    /// `E₁(ρ) = M₁ ρ M₁^†`.
    pub fn continue_branch(&self) -> &SuperOperator {
        &self.e1
    }

    /// `G = E ∘ E₁`.
    pub fn step(&self) -> &SuperOperator {
        &self.g
    }

    /// `||Σ (E_i M₁)^†(E_i M₁) + M₀^† M₀ - I||_max`; zero for a valid scheme.
    pub fn halting_split_deviation(&self) -> f64 {
        let total = self.g.kraus_gram() + self.e0.kraus_gram();
        max_abs(&(total - identity(self.dim())))
    }

    pub fn with_initial_state(self, rho0: DensityOperator) -> Result<QuantumProgram> {
        QuantumProgram::new(self, rho0)
    }
}

/// A scheme together with a unit-trace initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumProgram {
    scheme: ProgramScheme,
    rho0: DensityOperator,
}

impl QuantumProgram {
    pub fn new(scheme: ProgramScheme, rho0: DensityOperator) -> Result<Self> {
        if rho0.dim() != scheme.dim() {
            return Err(Error::DimensionMismatch {
                expected: scheme.dim(),
                found: rho0.dim(),
            });
        }
        let tr = rho0.trace();
        if (tr - 1.0).abs() > Tolerances::default().tp.max(1e-9) {
            return Err(Error::InvalidTrace { trace: tr });
        }
        Ok(Self { scheme, rho0 })
    }

    pub fn scheme(&self) -> &ProgramScheme {
        &self.scheme
    }

    pub fn initial_state(&self) -> &DensityOperator {
        &self.rho0
    }

    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }
}

/// One step of the execution record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based step index.
    pub n: usize,
    /// Probability of halting at step `n`, `tr(E₀(G^{n-1}(ρ₀)))`.
    pub p_n: f64,
    /// Probability of still running after step `n`, `tr(E₁(G^{n-1}(ρ₀)))`.
    pub p_n_nontermination: f64,
    /// Unnormalized state produced on halting at step `n`.
    pub partial_terminal: DensityOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub steps: Vec<StepRecord>,
    pub residual_mass: f64,
}

impl StepTrace {
    pub fn halting_probability(&self) -> f64 {
        self.steps.iter().map(|s| s.p_n).sum()
    }
}

/// Halting / non-halting probabilities for steps `1..=n_max`.
///
/// Partial states are left unnormalized.
pub fn step_probabilities(prog: &QuantumProgram, n_max: usize) -> StepTrace {
    let scheme = prog.scheme();
    let mut state = prog.initial_state().matrix().clone();
    let mut steps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let halted = scheme.e0.apply_unchecked(&state);
        let running = scheme.e1.apply_unchecked(&state);
        let p_n = halted.trace().re;
        let p_nt = running.trace().re;
        steps.push(StepRecord {
            n,
            p_n,
            p_n_nontermination: p_nt,
            partial_terminal: DensityOperator::from_matrix_unchecked(halted),
        });
        state = scheme.e.apply_unchecked(&running);
    }
    let residual_mass = steps.last().map_or(1.0, |s| s.p_n_nontermination);
    StepTrace {
        steps,
        residual_mass,
    }
}

/// Truncated terminal state.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub rho_star: DensityOperator,
    /// Non-termination mass left after the last summed term.
    pub residual: f64,
    /// Index of the last summed term (`n` in `E₀(Gⁿ(ρ₀))`).
    pub n_used: usize,
    pub converged: bool,
}

/// `Σ_{n ≤ n_used} E₀(Gⁿ(ρ₀))` where `n_used` is the first `n` with
/// `tr(G^{n+1}(ρ₀)) < tail_tol`, or `n_max - 1`.
///
/// A program that does not almost-terminate still yields a result, with
/// `residual > tail_tol` and `converged == false`.
pub fn terminal_state_series(prog: &QuantumProgram, opts: &SeriesOptions) -> SeriesResult {
    terminal_state_from(prog.scheme(), prog.initial_state().matrix(), opts)
}

pub(crate) fn terminal_state_from(
    scheme: &ProgramScheme,
    rho: &ComplexMatrix,
    opts: &SeriesOptions,
) -> SeriesResult {
    let d = scheme.dim();
    let mut acc = linalg::zeros(d);
    let mut state = rho.clone();
    let mut residual = state.trace().re;
    let mut n_used = 0;
    let mut converged = false;
    for n in 0..opts.n_max.max(1) {
        acc += scheme.e0.apply_unchecked(&state);
        state = scheme.g.apply_unchecked(&state);
        residual = state.trace().re;
        n_used = n;
        if residual < opts.tail_tol {
            converged = true;
            break;
        }
    }
    SeriesResult {
        rho_star: DensityOperator::from_matrix_unchecked(acc),
        residual,
        n_used,
        converged,
    }
}

/// `||F(ρ) - E₀(ρ) - F(G(ρ))||_max` with `F` evaluated by the series.
pub fn check_recursion(
    prog: &QuantumProgram,
    rho: &DensityOperator,
    opts: &SeriesOptions,
) -> Result<f64> {
    let scheme = prog.scheme();
    require_dim(rho.matrix(), scheme.dim())?;
    let lhs = terminal_state_from(scheme, rho.matrix(), opts)
        .rho_star
        .into_matrix();
    let halted = scheme.e0.apply_unchecked(rho.matrix());
    let advanced = scheme.g.apply_unchecked(rho.matrix());
    let tail = terminal_state_from(scheme, &advanced, opts)
        .rho_star
        .into_matrix();
    Ok(max_abs(&(lhs - halted - tail)))
}
