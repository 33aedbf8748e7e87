// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Vectorization convention: an operator `A` on a `d`-dimensional space maps
//! to the `d^2` vector `(A ⊗ I)|Φ⟩` with `|Φ⟩ = Σ_j |jj⟩`, which is the
//! row-major flattening `v[i*d + j] = A[i, j]`. Under this convention
//! `(A ⊗ B*)` acts on vectorized operators as `X ↦ A X B^†`.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(d, d)
}

/// Builds a real matrix from row slices. Panics on ragged input.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, c, |i, j| {
        assert_eq!(rows[i].len(), c, "ragged rows");
        c64(rows[i][j], 0.0)
    })
}

/// `|i⟩⟨j|` on a `d`-dimensional space.
pub fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(d);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

/// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
pub fn projector(psi: &[C64]) -> ComplexMatrix {
    let v = ComplexVector::from_column_slice(psi);
    &v * v.adjoint()
}

pub fn pauli_x() -> ComplexMatrix {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_z() -> ComplexMatrix {
    from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Kronecker product, `(a ⊗ b)[(i*rb + k, j*cb + l)] = a[i, j] * b[k, l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest entry modulus, `||A||_max`.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn require_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn require_dim(a: &ComplexMatrix, d: usize) -> Result<()> {
    let n = require_square(a)?;
    if n != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: n,
        });
    }
    Ok(())
}

pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = hermitian_part(a);
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), h);
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Löwner positivity: Hermitian within `tol.herm` and
/// `λ_min ≥ -tol_psd * max(1, ||a||)`.
pub fn is_positive_semidefinite(a: &ComplexMatrix, tol_psd: f64) -> Result<bool> {
    is_positive_semidefinite_with(a, tol_psd, &Tolerances::default())
}

pub fn is_positive_semidefinite_with(
    a: &ComplexMatrix,
    tol_psd: f64,
    tol: &Tolerances,
) -> Result<bool> {
    require_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let scale = max_abs(a).max(1.0);
    if hermitian_deviation(a) > tol.herm * scale {
        return Ok(false);
    }
    let (values, _) = hermitian_eigen(a);
    let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    Ok(values.first().is_none_or(|&min| min >= -tol_psd * norm))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(0.0)
}

/// Largest eigenvalue of the Hermitian part.
pub fn max_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_eigen(a).0.last().copied().unwrap_or(0.0)
}

/// Splits a Hermitian matrix into positive and negative spectral parts,
/// `h = pos - neg`, with orthogonal supports.
pub fn spectral_split(h: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (values, vecs) = hermitian_eigen(h);
    let n = h.nrows();
    let mut pos = zeros(n);
    let mut neg = zeros(n);
    for (k, &lam) in values.iter().enumerate() {
        let v = vecs.column(k);
        let outer = v * v.adjoint();
        if lam > 0.0 {
            pos += outer.scale(lam);
        } else if lam < 0.0 {
            neg += outer.scale(-lam);
        }
    }
    (pos, neg)
}

/// `(A ⊗ I)|Φ⟩`, i.e. the row-major flattening of `A`.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    let (r, c) = a.shape();
    ComplexVector::from_fn(r * c, |k, _| a[(k / c, k % c)])
}

/// Inverse of [`vectorize`] for a `d x d` operator.
pub fn unvectorize(v: &ComplexVector, d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d, "vector length must be d^2");
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Unnormalized maximally entangled vector `|Φ⟩ = Σ_j |jj⟩`.
pub fn max_entangled(d: usize) -> ComplexVector {
    vectorize(&identity(d))
}

/// `⟨Φ|v⟩`, the trace of the operator whose vectorization is `v`.
pub fn phi_inner(v: &ComplexVector, d: usize) -> C64 {
    (0..d).map(|j| v[j * d + j]).sum()
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Spectral norm.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rel_tol * max(1, σ_max)`.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Upper bound on the largest Jordan block at eigenvalue zero: the smallest
/// `k ≥ 0` with `rank(A^k) = rank(A^{k+1})`.
pub fn nilpotent_index_bound(a: &ComplexMatrix, rel_tol: f64) -> usize {
    let n = a.nrows();
    let mut power = identity(n);
    let mut rank = n;
    for k in 0..=n {
        let next = a * &power;
        let next_rank = numerical_rank(&next, rel_tol);
        if next_rank == rank {
            return k;
        }
        power = next;
        rank = next_rank;
    }
    n
}

/// Solves `a x = b` by LU; `None` when `a` is singular.
pub fn solve(a: &ComplexMatrix, b: &ComplexVector) -> Option<ComplexVector> {
    a.clone().lu().solve(b)
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub center: C64,
    pub members: Vec<usize>,
    pub unit: bool,
}

/// Spectrum of a square matrix together with biorthonormal eigenvector pairs
/// spanning every unit-modulus cluster.
///
/// The contracting part of the spectrum carries eigenvalues only; no Jordan
/// chains are computed anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub dim: usize,
    pub eigenvalues: Vec<C64>,
    /// `cluster_ids[i]` indexes into `clusters` for eigenvalue `i`.
    pub cluster_ids: Vec<usize>,
    pub clusters: Vec<EigenCluster>,
    pub unit_circle_flags: Vec<bool>,
    /// Right eigenvectors (columns) of all unit-modulus clusters.
    pub right_vectors: ComplexMatrix,
    /// Left eigenvectors (columns), `left^† right = I` on each cluster.
    pub left_vectors: ComplexMatrix,
    /// Cluster index of every column of `right_vectors` / `left_vectors`.
    pub pair_clusters: Vec<usize>,
    pub zero_nilpotent_index_bound: usize,
}

impl SpectralData {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn has_unit_eigenvalues(&self) -> bool {
        self.unit_circle_flags.iter().any(|&f| f)
    }

    /// `1 - max{|λ| : λ not unit-modulus}`, or 1 when every eigenvalue is unit-modulus.
    pub fn contraction_margin(&self) -> f64 {
        let inner = self
            .eigenvalues
            .iter()
            .zip(&self.unit_circle_flags)
            .filter(|(_, &unit)| !unit)
            .fold(0.0_f64, |m, (z, _)| m.max(z.norm()));
        1.0 - inner
    }

    /// Spectral projector onto one unit-modulus cluster.
    pub fn cluster_projector(&self, cluster: usize) -> ComplexMatrix {
        let mut p = zeros(self.dim);
        for (col, _) in self
            .pair_clusters
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cluster)
        {
            p += self.right_vectors.column(col) * self.left_vectors.column(col).adjoint();
        }
        p
    }

    /// `Σ right · left^†` over all unit-modulus pairs.
    pub fn unit_projector(&self) -> ComplexMatrix {
        &self.right_vectors * self.left_vectors.adjoint()
    }

    /// Indices of unit-modulus clusters.
    pub fn unit_clusters(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.unit)
            .map(|(i, _)| i)
    }
}

fn cluster_eigenvalues(values: &[C64], rel_tol: f64) -> Vec<usize> {
    let radius = values.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let thresh = rel_tol * radius.max(1.0);
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= thresh {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut ids = vec![0; n];
    for (i, slot) in ids.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        let id = match roots.iter().position(|&x| x == r) {
            Some(id) => id,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        *slot = id;
    }
    ids
}

/// Eigenvalues of a general complex square matrix, via the complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = require_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000 * n).ok_or(Error::EigenSolver {
        dim: n,
        norm: a.norm(),
    })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues, clustering, unit-circle eigenvector pairs and the nilpotent
/// index bound at zero.
///
/// Fails with [`Error::NotSemisimple`] when a unit-modulus cluster has fewer
/// independent eigenvectors than its multiplicity.
pub fn spectral_decompose(a: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralData> {
    let n = require_square(a)?;
    let values = eigenvalues(a)?;
    let cluster_ids = cluster_eigenvalues(&values, tol.cluster);
    let n_clusters = cluster_ids.iter().copied().max().map_or(0, |m| m + 1);
    let unit_circle_flags: Vec<bool> = values
        .iter()
        .map(|z| (z.norm() - 1.0).abs() <= tol.eps_unit)
        .collect();

    let mut clusters: Vec<EigenCluster> = (0..n_clusters)
        .map(|_| EigenCluster {
            center: C64::new(0.0, 0.0),
            members: Vec::new(),
            unit: false,
        })
        .collect();
    for (i, &cid) in cluster_ids.iter().enumerate() {
        let cl = &mut clusters[cid];
        cl.members.push(i);
        cl.center += values[i];
        cl.unit |= unit_circle_flags[i];
    }
    for cl in &mut clusters {
        cl.center /= cl.members.len() as f64;
    }

    let norm = operator_norm(a).max(1.0);
    let accept = 10.0 * tol.cluster.max(tol.eig) * norm;
    let mut right_cols: Vec<ComplexVector> = Vec::new();
    let mut left_cols: Vec<ComplexVector> = Vec::new();
    let mut pair_clusters = Vec::new();

    for (cid, cl) in clusters.iter().enumerate().filter(|(_, c)| c.unit) {
        let k = cl.members.len();
        let shifted = a - identity(n) * cl.center;
        // Both null spaces are read off right singular vectors; the U factor
        // is less accurate when other singular values are repeated.
        let svd = SVD::new(shifted.clone(), false, true);
        let svd_adj = SVD::new(shifted.adjoint(), false, true);
        let v = svd.v_t.as_ref().expect("requested V^t").adjoint();
        let v_adj = svd_adj.v_t.as_ref().expect("requested V^t").adjoint();
        // SVD::new sorts singular values descending; the null space is the tail.
        let worst = svd.singular_values[n - k].max(svd_adj.singular_values[n - k]);
        if worst > accept {
            return Err(Error::NotSemisimple {
                re: cl.center.re,
                im: cl.center.im,
                residual: worst,
            });
        }
        let right = v.columns(n - k, k).into_owned();
        let left0 = v_adj.columns(n - k, k).into_owned();
        let gram = left0.adjoint() * &right;
        let gram_min = singular_values(&gram).last().copied().unwrap_or(0.0);
        if gram_min < 1e-8 {
            // Left and right eigenspaces (numerically) orthogonal: a Jordan chain.
            return Err(Error::NotSemisimple {
                re: cl.center.re,
                im: cl.center.im,
                residual: gram_min,
            });
        }
        let gram_inv = gram.try_inverse().ok_or(Error::NotSemisimple {
            re: cl.center.re,
            im: cl.center.im,
            residual: gram_min,
        })?;
        let left = left0 * gram_inv.adjoint();
        for j in 0..k {
            right_cols.push(right.column(j).into_owned());
            left_cols.push(left.column(j).into_owned());
            pair_clusters.push(cid);
        }
    }

    let stack = |cols: &[ComplexVector]| {
        if cols.is_empty() {
            ComplexMatrix::zeros(n, 0)
        } else {
            ComplexMatrix::from_columns(cols)
        }
    };

    Ok(SpectralData {
        dim: n,
        zero_nilpotent_index_bound: nilpotent_index_bound(a, tol.zero_vec),
        eigenvalues: values,
        cluster_ids,
        clusters,
        unit_circle_flags,
        right_vectors: stack(&right_cols),
        left_vectors: stack(&left_cols),
        pair_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> ComplexMatrix {
        let n = entries.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c64(entries[i], 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    }

    #[test]
    fn kron_identity() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
    }

    #[test]
    fn kron_pauli_x_is_antidiagonal() {
        let k = kron(&pauli_x(), &pauli_x());
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c64(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_of_raising_operators() {
        let e01 = ket_bra(2, 0, 1);
        let k = kron(&e01, &e01);
        assert_eq!(k, ket_bra(4, 0, 3));
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive_semidefinite(&zeros(3), 1e-9).unwrap());
        assert!(!is_positive_semidefinite(&diag(&[1.0, -1e-3]), 1e-9).unwrap());
        let plus = from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(is_positive_semidefinite(&plus, 1e-9).unwrap());
    }

    #[test]
    fn positivity_rejects_rectangular() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            is_positive_semidefinite(&a, 1e-9),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn positivity_rejects_non_hermitian() {
        let a = ket_bra(2, 0, 1);
        assert!(!is_positive_semidefinite(&a, 1e-9).unwrap());
    }

    #[test]
    fn spectral_diag() {
        let sd = spectral_decompose(&diag(&[1.0, 0.5]), &Tolerances::default()).unwrap();
        let mut evs: Vec<f64> = sd.eigenvalues.iter().map(|z| z.re).collect();
        evs.sort_by(f64::total_cmp);
        assert_eq!(evs, vec![0.5, 1.0]);
        for (z, &flag) in sd.eigenvalues.iter().zip(&sd.unit_circle_flags) {
            assert_eq!(flag, (z.re - 1.0).abs() < 1e-12);
        }
        assert_eq!(sd.right_vectors.ncols(), 1);
        let p = sd.unit_projector();
        assert!(max_abs(&(&p - ket_bra(2, 0, 0))) < 1e-12);
        assert_eq!(sd.zero_nilpotent_index_bound, 0);
    }

    #[test]
    fn spectral_nilpotent() {
        let a = ket_bra(2, 0, 1);
        let sd = spectral_decompose(&a, &Tolerances::default()).unwrap();
        assert!(sd.eigenvalues.iter().all(|z| z.norm() < 1e-12));
        assert_eq!(sd.zero_nilpotent_index_bound, 2);
        assert!(!sd.has_unit_eigenvalues());
    }

    #[test]
    fn spectral_rejects_unit_jordan_block() {
        let a = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let err = spectral_decompose(&a, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NotSemisimple { .. }), "{err:?}");
    }

    #[test]
    fn degenerate_unit_cluster_is_grouped() {
        // Rotation by a phase on a 2-dim block plus a repeated 1.
        let mut a = identity(4);
        a[(2, 2)] = c64(0.0, 1.0);
        a[(3, 3)] = c64(0.3, 0.0);
        let sd = spectral_decompose(&a, &Tolerances::default()).unwrap();
        let ones = sd
            .clusters
            .iter()
            .find(|c| (c.center - c64(1.0, 0.0)).norm() < 1e-9)
            .unwrap();
        assert_eq!(ones.members.len(), 2);
        assert_eq!(sd.right_vectors.ncols(), 3);
        let p = sd.unit_projector();
        assert!(max_abs(&(&p * &p - &p)) < 1e-9);
        assert!((sd.contraction_margin() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn vectorize_matches_phi_convention() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c64(i as f64, j as f64));
        let direct = kron(&a, &identity(3)) * max_entangled(3);
        assert_eq!(direct, vectorize(&a));
        assert_eq!(unvectorize(&vectorize(&a), 3), a);
    }

    #[test]
    fn split_recovers_matrix() {
        let h = diag(&[1.0, -2.0]);
        let (p, n) = spectral_split(&h);
        assert!(max_abs(&(&p - diag(&[1.0, 0.0]))) < 1e-14);
        assert!(max_abs(&(&n - diag(&[0.0, 2.0]))) < 1e-14);
    }
}
