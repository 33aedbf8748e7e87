// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form analysis through matrix representations.
//!
//! `N₀ = M₀ ⊗ M₀*`, `N₁ = M₁ ⊗ M₁*` and `M = Σ_i (E_i M₁) ⊗ (E_i M₁)*`
//! represent `E₀`, `E₁` and `G`. Removing the unit-circle spectral component
//! of `M` gives `N = M - M P_u`, for which `I - N` is invertible and
//! `N₀ Mⁿ = N₀ Nⁿ` for all `n`.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityOperator, Observable};
use crate::error::{Error, Result};
use crate::linalg::{
    self, identity, max_abs, operator_norm, phi_inner, vectorize, ComplexMatrix, ComplexVector,
    SpectralData,
};
use crate::program::ProgramScheme;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramRepresentation {
    pub dim: usize,
    pub dim2: usize,
    pub n0: ComplexMatrix,
    /// Representation of `E₁`; stored for completeness, no formula uses it.
    pub n1: ComplexMatrix,
    pub m: ComplexMatrix,
    pub spectral: SpectralData,
    /// Spectral projector onto the unit-circle eigenspace of `m` (zero when none).
    pub unit_projector: ComplexMatrix,
    /// `N = M - M P_u`.
    pub n_filtered: ComplexMatrix,
    pub phi: ComplexVector,
    /// `1 - max{|λ| : λ off the unit circle}`.
    pub margin: f64,
    pub tolerances: Tolerances,
}

/// Mean number of loop iterations until halting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RunningTime {
    Finite(f64),
    /// Halting probability is below one. `weight` is the evidence: `||P_u x||`
    /// for the closed form, the residual non-termination mass for the series.
    Infinite {
        weight: f64,
    },
}

impl RunningTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            RunningTime::Finite(v) => Some(v),
            RunningTime::Infinite { .. } => None,
        }
    }
}

impl std::fmt::Display for RunningTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunningTime::Finite(v) => write!(f, "{v:.9}"),
            RunningTime::Infinite { weight } => {
                write!(f, "infinite (non-halting weight {weight:.3e})")
            }
        }
    }
}

pub fn build_representation(scheme: &ProgramScheme) -> Result<ProgramRepresentation> {
    build_representation_with(scheme, &Tolerances::default())
}

pub fn build_representation_with(
    scheme: &ProgramScheme,
    tol: &Tolerances,
) -> Result<ProgramRepresentation> {
    let dim = scheme.dim();
    let dim2 = dim * dim;
    let n0 = scheme.halt_branch().matrix_representation();
    let n1 = scheme.continue_branch().matrix_representation();
    let m = scheme.step().matrix_representation();
    let spectral = linalg::spectral_decompose(&m, tol)?;

    let radius = spectral.spectral_radius();
    if radius > 1.0 + tol.eps_unit {
        return Err(Error::SpectralRadius { radius });
    }

    let scale = operator_norm(&m).max(1.0);
    for cid in spectral.unit_clusters() {
        let proj = spectral.cluster_projector(cid);
        let lambda = spectral.clusters[cid].center;
        let residual = max_abs(&((&m - identity(dim2) * lambda) * &proj));
        if residual > tol.proj * scale {
            return Err(Error::NotSemisimple {
                re: lambda.re,
                im: lambda.im,
                residual,
            });
        }
    }

    let unit_projector = spectral.unit_projector();
    let idem = max_abs(&(&unit_projector * &unit_projector - &unit_projector));
    let comm = max_abs(&(&m * &unit_projector - &unit_projector * &m));
    if idem > tol.proj * scale || comm > tol.proj * scale {
        let worst = spectral
            .unit_clusters()
            .next()
            .map(|c| spectral.clusters[c].center);
        let lambda = worst.unwrap_or_default();
        return Err(Error::NotSemisimple {
            re: lambda.re,
            im: lambda.im,
            residual: idem.max(comm),
        });
    }

    let n_filtered = &m - &m * &unit_projector;
    let margin = spectral.contraction_margin();
    Ok(ProgramRepresentation {
        dim,
        dim2,
        n0,
        n1,
        m,
        spectral,
        unit_projector,
        n_filtered,
        phi: linalg::max_entangled(dim),
        margin,
        tolerances: *tol,
    })
}

impl ProgramRepresentation {
    fn resolvent_apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        let a = identity(self.dim2) - &self.n_filtered;
        let y = linalg::solve(&a, x).ok_or(Error::SingularResolvent)?;
        let residual = (&a * &y - x).norm();
        if !residual.is_finite() || residual > 1e-8 * x.norm().max(1.0) {
            return Err(Error::SingularResolvent);
        }
        Ok(y)
    }

    /// `(ρ₀ ⊗ I)|Φ⟩`.
    pub fn state_vector(&self, rho0: &DensityOperator) -> Result<ComplexVector> {
        linalg::require_dim(rho0.matrix(), self.dim)?;
        Ok(vectorize(rho0.matrix()))
    }

    /// `||P_u x||` for `x = (ρ₀ ⊗ I)|Φ⟩`.
    pub fn unit_overlap(&self, x: &ComplexVector) -> f64 {
        (&self.unit_projector * x).norm()
    }

    /// Vectorized terminal state `N₀ (I - N)⁻¹ (ρ₀ ⊗ I)|Φ⟩`.
    pub fn terminal_vector(&self, rho0: &DensityOperator) -> Result<ComplexVector> {
        let x = self.state_vector(rho0)?;
        Ok(&self.n0 * self.resolvent_apply(&x)?)
    }

    /// Terminal state in closed form.
    pub fn terminal_state(&self, rho0: &DensityOperator) -> Result<ComplexMatrix> {
        Ok(linalg::unvectorize(&self.terminal_vector(rho0)?, self.dim))
    }
}

/// `⟨Φ|(P ⊗ I) N₀ (I - N)⁻¹ (ρ₀ ⊗ I)|Φ⟩`, valid for any Hermitian `P`.
pub fn expectation_closed_form(
    rep: &ProgramRepresentation,
    rho0: &DensityOperator,
    p: &Observable,
) -> Result<f64> {
    linalg::require_dim(p.matrix(), rep.dim)?;
    let z = rep.terminal_vector(rho0)?;
    let pz = linalg::kron(p.matrix(), &identity(rep.dim)) * z;
    let value = phi_inner(&pz, rep.dim);
    if value.im.abs() > 1e-9 * value.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// `⟨Φ| N₀ (I - N)⁻² (ρ₀ ⊗ I)|Φ⟩`, or [`RunningTime::Infinite`] when the
/// initial state overlaps the unit-circle eigenspace.
pub fn average_running_time(
    rep: &ProgramRepresentation,
    rho0: &DensityOperator,
) -> Result<RunningTime> {
    let x = rep.state_vector(rho0)?;
    let overlap = rep.unit_overlap(&x);
    if overlap > rep.tolerances.zero_vec.max(1e-9) * x.norm() {
        return Ok(RunningTime::Infinite { weight: overlap });
    }
    let y = rep.resolvent_apply(&x)?;
    let z = rep.resolvent_apply(&y)?;
    let value = phi_inner(&(&rep.n0 * z), rep.dim);
    if value.im.abs() > 1e-9 * value.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation { imag: value.im });
    }
    Ok(RunningTime::Finite(value.re))
}

/// `||N₀ Mⁿ - N₀ Nⁿ||_max`.
pub fn filtered_power_residual(rep: &ProgramRepresentation, n: usize) -> f64 {
    let mut lhs = rep.n0.clone();
    let mut rhs = rep.n0.clone();
    for _ in 0..n {
        lhs = &lhs * &rep.m;
        rhs = &rhs * &rep.n_filtered;
    }
    max_abs(&(lhs - rhs))
}

/// `||Mⁿ α|| ≤ 4 √d ||α||` (with `1e-9` slack).
pub fn power_bound_holds(rep: &ProgramRepresentation, alpha: &ComplexVector, n: usize) -> bool {
    let (lhs, bound) = power_bound_ratio(rep, alpha, n);
    lhs <= bound + 1e-9
}

/// `(||Mⁿ α||, 4 √d ||α||)`.
pub fn power_bound_ratio(
    rep: &ProgramRepresentation,
    alpha: &ComplexVector,
    n: usize,
) -> (f64, f64) {
    let mut v = alpha.clone();
    for _ in 0..n {
        v = &rep.m * v;
    }
    (v.norm(), 4.0 * (rep.dim as f64).sqrt() * alpha.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SuperOperator;
    use crate::linalg::{c64, ket_bra, pauli_x};
    use crate::program::TerminationMeasurement;

    fn bit_flip_scheme(p: f64) -> ProgramScheme {
        let e = SuperOperator::new(vec![
            identity(2).scale(p.sqrt()),
            pauli_x().scale((1.0 - p).sqrt()),
        ])
        .unwrap();
        ProgramScheme::new(e, TerminationMeasurement::computational(2, &[0])).unwrap()
    }

    fn psi(alpha: f64) -> DensityOperator {
        let beta = (1.0 - alpha * alpha).sqrt();
        DensityOperator::pure(&[c64(alpha, 0.0), c64(0.0, beta)]).unwrap()
    }

    #[test]
    fn bit_flip_representation_matches_worked_example() {
        let p = 0.5;
        let rep = build_representation(&bit_flip_scheme(p)).unwrap();
        let mut expected = linalg::zeros(4);
        expected[(0, 3)] = c64(1.0 - p, 0.0);
        expected[(3, 3)] = c64(p, 0.0);
        assert!(max_abs(&(&rep.m - expected)) <= 4.0 * f64::EPSILON);
        assert!(!rep.spectral.has_unit_eigenvalues());
        assert!(max_abs(&(&rep.n_filtered - &rep.m)) < 1e-15);
        assert!((rep.margin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bit_flip_p1_filters_unit_eigenvalue() {
        let rep = build_representation(&bit_flip_scheme(1.0)).unwrap();
        assert_eq!(rep.m, ket_bra(4, 3, 3));
        assert!(max_abs(&rep.n_filtered) < 1e-12);
        assert!(filtered_power_residual(&rep, 1) < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let p0 = Observable::new(ket_bra(2, 0, 0)).unwrap();
        for &p in &[0.1, 0.5, 0.9] {
            let rep = build_representation(&bit_flip_scheme(p)).unwrap();
            let v = expectation_closed_form(&rep, &psi(0.6), &p0).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let rep = build_representation(&bit_flip_scheme(1.0)).unwrap();
        let v = expectation_closed_form(&rep, &psi(0.6), &p0).unwrap();
        assert!((v - 0.36).abs() < 1e-12);
    }

    #[test]
    fn running_time_examples() {
        for &p in &[0.1, 0.5, 0.9] {
            let rep = build_representation(&bit_flip_scheme(p)).unwrap();
            let t = average_running_time(&rep, &psi(0.6))
                .unwrap()
                .finite()
                .unwrap();
            assert!((t - (1.0 + 0.64 / (1.0 - p))).abs() < 1e-10);
        }
        let rep = build_representation(&bit_flip_scheme(0.5)).unwrap();
        let t = average_running_time(&rep, &DensityOperator::basis(2, 1)).unwrap();
        assert!((t.finite().unwrap() - 3.0).abs() < 1e-12);

        let rep = build_representation(&bit_flip_scheme(1.0)).unwrap();
        assert!(matches!(
            average_running_time(&rep, &psi(0.6)).unwrap(),
            RunningTime::Infinite { .. }
        ));
    }

    #[test]
    fn immediate_termination_closed_form() {
        let meas = TerminationMeasurement::new(identity(2), linalg::zeros(2)).unwrap();
        let scheme = ProgramScheme::new(SuperOperator::identity(2), meas).unwrap();
        let rep = build_representation(&scheme).unwrap();
        assert_eq!(max_abs(&rep.m), 0.0);
        assert_eq!(max_abs(&rep.n_filtered), 0.0);
        let rho = psi(0.8);
        let obs = Observable::new(linalg::pauli_z()).unwrap();
        let v = expectation_closed_form(&rep, &rho, &obs).unwrap();
        assert!((v - rho.expectation(&obs)).abs() < 1e-14);
        let t = average_running_time(&rep, &rho).unwrap().finite().unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn filtered_power_base_case() {
        let rep = build_representation(&bit_flip_scheme(0.3)).unwrap();
        assert_eq!(filtered_power_residual(&rep, 0), 0.0);
    }

    #[test]
    fn a1_bound_on_phi() {
        let rep = build_representation(&bit_flip_scheme(0.3)).unwrap();
        assert!(power_bound_holds(&rep, &rep.phi, 0));
    }

    #[test]
    fn a1_bound_isometry_case() {
        // Unitary loop body that never halts: M is unitary and preserves norms.
        let h = linalg::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(1.0 / 2f64.sqrt());
        let meas = TerminationMeasurement::new(linalg::zeros(2), identity(2)).unwrap();
        let scheme = ProgramScheme::new(SuperOperator::new(vec![h]).unwrap(), meas).unwrap();
        let rep = build_representation(&scheme).unwrap();
        let alpha = ComplexVector::from_fn(4, |k, _| c64(k as f64 - 1.5, 0.5));
        for n in 0..20 {
            let (lhs, bound) = power_bound_ratio(&rep, &alpha, n);
            assert!((lhs - alpha.norm()).abs() < 1e-12);
            assert!(lhs <= bound);
        }
    }
}
