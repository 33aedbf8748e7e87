// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Super-operators in Kraus form, states and observables.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, hermitian_deviation, identity, is_finite, kron, max_abs, require_dim,
    require_square, ComplexMatrix, C64,
};
use crate::tolerance::Tolerances;

/// A completely positive, trace-non-increasing map `ρ ↦ Σ_i E_i ρ E_i^†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl SuperOperator {
    /// Validates `Σ E_i^† E_i ⊑ I` within the default `tp` tolerance.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerances(kraus, &Tolerances::default())
    }

    pub fn with_tolerances(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = require_square(first)?;
        for k in &kraus {
            require_dim(k, dim)?;
            if !is_finite(k) {
                return Err(Error::NonFinite);
            }
        }
        let gram = kraus_gram(&kraus, dim);
        let top = linalg::max_eigenvalue(&gram);
        if top > 1.0 + tol.tp {
            return Err(Error::NotSubNormalized { eigenvalue: top });
        }
        let trace_preserving = max_abs(&(gram - identity(dim))) <= tol.tp;
        Ok(Self {
            dim,
            kraus,
            trace_preserving,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![identity(dim)],
            trace_preserving: true,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![linalg::zeros(dim)],
            trace_preserving: dim == 0,
        }
    }

    /// `ρ ↦ A ρ A^†` for a single operator; fails unless `A^† A ⊑ I`.
    pub fn conjugation(a: ComplexMatrix) -> Result<Self> {
        Self::new(vec![a])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `Σ_i E_i^† E_i`.
    pub fn kraus_gram(&self) -> ComplexMatrix {
        kraus_gram(&self.kraus, self.dim)
    }

    /// `Σ_i E_i A E_i^†` for an arbitrary square matrix.
    pub fn apply_to(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        require_dim(a, self.dim)?;
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = linalg::zeros(self.dim);
        for e in &self.kraus {
            out += e * a * e.adjoint();
        }
        out
    }

    /// `Σ_i E_i^† A E_i`.
    pub fn apply_dual_to(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        require_dim(a, self.dim)?;
        Ok(self.apply_dual_unchecked(a))
    }

    pub(crate) fn apply_dual_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = linalg::zeros(self.dim);
        for e in &self.kraus {
            out += e.adjoint() * a * e;
        }
        out
    }

    /// Schrödinger picture.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply_to(&rho.mat)?;
        Ok(DensityOperator { mat: out })
    }

    /// Heisenberg picture.
    pub fn apply_dual(&self, m: &Observable) -> Result<Observable> {
        let mut out = self.apply_dual_to(&m.mat)?;
        symmetrize(&mut out);
        Ok(Observable { mat: out })
    }

    /// `self ∘ other`: Kraus list `{E_i F_j}`, not simplified.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let kraus: Vec<ComplexMatrix> = self
            .kraus
            .iter()
            .flat_map(|e| other.kraus.iter().map(move |f| e * f))
            .collect();
        let gram = kraus_gram(&kraus, self.dim);
        let trace_preserving = max_abs(&(gram - identity(self.dim))) <= Tolerances::default().tp;
        Ok(SuperOperator {
            dim: self.dim,
            kraus,
            trace_preserving,
        })
    }

    /// Sum of two super-operators (concatenated Kraus lists); the result must
    /// still be trace-non-increasing.
    pub fn sum(&self, other: &SuperOperator) -> Result<SuperOperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let kraus = self.kraus.iter().chain(&other.kraus).cloned().collect();
        SuperOperator::new(kraus)
    }

    /// `Σ_i E_i ⊗ E_i^*`, the `d² x d²` matrix acting on vectorized operators.
    pub fn matrix_representation(&self) -> ComplexMatrix {
        let d2 = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(d2, d2);
        for e in &self.kraus {
            m += kron(e, &e.conjugate());
        }
        m
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`; positive for every Kraus-form map.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let image = self.apply_unchecked(&linalg::ket_bra(d, i, j));
                choi += kron(&linalg::ket_bra(d, i, j), &image);
            }
        }
        choi
    }
}

fn kraus_gram(kraus: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut gram = linalg::zeros(dim);
    for e in kraus {
        gram += e.adjoint() * e;
    }
    gram
}

fn symmetrize(a: &mut ComplexMatrix) {
    let h = linalg::hermitian_part(a);
    *a = h;
}

/// A partial density operator: positive with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::default())
    }

    pub fn with_tolerances(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        require_square(&mat)?;
        if !is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let dev = hermitian_deviation(&mat);
        if dev > tol.herm {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let min = linalg::min_eigenvalue(&mat);
        if min < -tol.tp.max(tol.herm) {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let tr = mat.trace().re;
        if tr > 1.0 + tol.tp {
            return Err(Error::InvalidTrace { trace: tr });
        }
        Ok(Self { mat })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(linalg::projector(psi))
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: identity(d).scale(1.0 / d as f64),
        }
    }

    /// `|i⟩⟨i|`.
    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            mat: linalg::ket_bra(d, i, i),
        }
    }

    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `tr(O ρ)`, real part.
    pub fn expectation(&self, o: &Observable) -> f64 {
        linalg::trace_product(&o.mat, &self.mat).re
    }
}

/// A Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    mat: ComplexMatrix,
}

impl Observable {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::default())
    }

    pub fn with_tolerances(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        require_square(&mat)?;
        if !is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let dev = hermitian_deviation(&mat);
        if dev > tol.herm {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { mat })
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: identity(d) }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            mat: linalg::zeros(d),
        }
    }

    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn is_positive(&self) -> bool {
        linalg::is_positive_semidefinite(&self.mat, 1e-9).unwrap_or(false)
    }

    /// Positive and negative parts with orthogonal supports, `O = P₁ - P₂`.
    pub fn positive_parts(&self) -> (Observable, Observable) {
        let (pos, neg) = linalg::spectral_split(&self.mat);
        (Observable { mat: pos }, Observable { mat: neg })
    }
}

/// Positive matrices `B₁..B₄` with `A = B₁ - B₂ + i B₃ - i B₄`.
///
/// `B₁ - B₂` is the spectral split of `(A + A^†)/2` and `B₃ - B₄` that of
/// `-i (A - A^†)/2`; each pair has orthogonal supports.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveParts {
    pub b1: ComplexMatrix,
    pub b2: ComplexMatrix,
    pub b3: ComplexMatrix,
    pub b4: ComplexMatrix,
}

impl PositiveParts {
    pub fn recombine(&self) -> ComplexMatrix {
        let i = c64(0.0, 1.0);
        &self.b1 - &self.b2 + (&self.b3 - &self.b4) * i
    }

    pub fn parts(&self) -> [&ComplexMatrix; 4] {
        [&self.b1, &self.b2, &self.b3, &self.b4]
    }
}

pub fn positive_part_decompose(a: &ComplexMatrix) -> Result<PositiveParts> {
    require_square(a)?;
    let adj = a.adjoint();
    let re_part = (a + &adj).scale(0.5);
    let im_part = (a - &adj) * c64(0.0, -0.5);
    let (b1, b2) = linalg::spectral_split(&re_part);
    let (b3, b4) = linalg::spectral_split(&im_part);
    Ok(PositiveParts { b1, b2, b3, b4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, ket_bra, pauli_x};

    fn bit_flip(p: f64) -> SuperOperator {
        SuperOperator::new(vec![
            identity(2).scale(p.sqrt()),
            pauli_x().scale((1.0 - p).sqrt()),
        ])
        .unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = DensityOperator::new(from_real_rows(&[&[0.3, 0.1], &[0.1, 0.7]])).unwrap();
        let out = SuperOperator::identity(2).apply(&rho).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn bit_flip_on_ground_state() {
        let out = bit_flip(0.75).apply(&DensityOperator::basis(2, 0)).unwrap();
        let expected = from_real_rows(&[&[0.75, 0.0], &[0.0, 0.25]]);
        assert!(max_abs(&(out.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn lowering_channel() {
        let e = SuperOperator::conjugation(ket_bra(2, 0, 1)).unwrap();
        let out = e.apply(&DensityOperator::basis(2, 1)).unwrap();
        assert_eq!(out.matrix(), &ket_bra(2, 0, 0));
        assert!(!e.is_trace_preserving());
    }

    #[test]
    fn bit_flip_dual_matches_closed_form() {
        for &p in &[0.0, 0.3, 0.5, 1.0] {
            for &k in &[0.0, 0.4, 1.0, 2.5] {
                let n = from_real_rows(&[&[1.0, 0.0], &[0.0, k]]);
                let out = bit_flip(p)
                    .apply_dual(&Observable::new(n).unwrap())
                    .unwrap();
                let expected =
                    from_real_rows(&[&[p + (1.0 - p) * k, 0.0], &[0.0, p * k + (1.0 - p)]]);
                assert!(max_abs(&(out.matrix() - expected)) < 1e-14);
            }
        }
    }

    #[test]
    fn dual_is_unital_for_trace_preserving() {
        let out = bit_flip(0.2).apply_dual(&Observable::identity(2)).unwrap();
        assert!(max_abs(&(out.matrix() - identity(2))) < 1e-14);
    }

    #[test]
    fn compose_with_identity() {
        let f = bit_flip(0.3);
        let g = SuperOperator::identity(2).compose(&f).unwrap();
        assert!(max_abs(&(g.matrix_representation() - f.matrix_representation())) < 1e-15);
    }

    #[test]
    fn compose_with_measurement_branch() {
        let p: f64 = 0.4;
        let e1 = SuperOperator::conjugation(ket_bra(2, 1, 1)).unwrap();
        let g = bit_flip(p).compose(&e1).unwrap();
        let expected = [
            ket_bra(2, 1, 1).scale(p.sqrt()),
            ket_bra(2, 0, 1).scale((1.0 - p).sqrt()),
        ];
        for (got, want) in g.kraus().iter().zip(expected.iter()) {
            assert!(max_abs(&(got - want)) < 1e-15);
        }
    }

    #[test]
    fn compose_with_zero() {
        let g = bit_flip(0.5).compose(&SuperOperator::zero(2)).unwrap();
        assert_eq!(max_abs(&g.matrix_representation()), 0.0);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let err = bit_flip(0.5)
            .compose(&SuperOperator::identity(3))
            .unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn rejects_super_normalized_kraus() {
        let err = SuperOperator::new(vec![identity(2).scale(1.1)]).unwrap_err();
        match err {
            Error::NotSubNormalized { eigenvalue } => assert!((eigenvalue - 1.21).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(SuperOperator::new(vec![]).unwrap_err(), Error::EmptyKraus);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let rho = DensityOperator::maximally_mixed(3);
        assert!(matches!(
            bit_flip(0.5).apply(&rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_representation() {
        assert_eq!(
            SuperOperator::identity(2).matrix_representation(),
            identity(4)
        );
    }

    #[test]
    fn choi_is_positive() {
        let choi = bit_flip(0.3).choi_matrix();
        assert!(linalg::is_positive_semidefinite(&choi, 1e-12).unwrap());
    }

    #[test]
    fn positive_parts_examples() {
        let psd = from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let parts = positive_part_decompose(&psd).unwrap();
        assert!(max_abs(&(&parts.b1 - &psd)) < 1e-14);
        assert!(
            max_abs(&parts.b2) < 1e-14 && max_abs(&parts.b3) < 1e-14 && max_abs(&parts.b4) < 1e-14
        );

        let i2 = identity(2) * c64(0.0, 1.0);
        let parts = positive_part_decompose(&i2).unwrap();
        assert!(max_abs(&(&parts.b3 - identity(2))) < 1e-14);
        assert!(
            max_abs(&parts.b1) < 1e-14 && max_abs(&parts.b2) < 1e-14 && max_abs(&parts.b4) < 1e-14
        );

        let d = from_real_rows(&[&[1.0, 0.0], &[0.0, -2.0]]);
        let parts = positive_part_decompose(&d).unwrap();
        assert!(max_abs(&(&parts.b1 - from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]))) < 1e-14);
        assert!(max_abs(&(&parts.b2 - from_real_rows(&[&[0.0, 0.0], &[0.0, 2.0]]))) < 1e-14);
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::new(from_real_rows(&[&[1.0, 0.0], &[0.0, -0.1]])),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityOperator::new(identity(2)),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            Observable::new(ket_bra(2, 0, 1)),
            Err(Error::NotHermitian { .. })
        ));
    }
}
