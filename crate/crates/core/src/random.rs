// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random instances: channels, measurements, states, observables and a
//! few structured program families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{DensityOperator, Observable, SuperOperator};
use crate::linalg::{self, c64, hermitian_part, ComplexMatrix, ComplexVector, C64};
use crate::program::{ProgramScheme, QuantumProgram, TerminationMeasurement};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| c64(normal(rng), normal(rng)))
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(normal(rng), normal(rng)))
}

/// Haar-random unitary (QR of a Ginibre matrix with the phases of `R` removed).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, d, d).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `rows × cols` isometry, `rows ≥ cols`.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    unitary(rng, rows).columns(0, cols).into_owned()
}

/// Trace-preserving channel with `k` Kraus operators cut from a `kd × d` isometry.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> SuperOperator {
    let v = isometry(rng, k * d, d);
    let kraus = (0..k).map(|i| v.rows(i * d, d).into_owned()).collect();
    SuperOperator::new(kraus).expect("isometry blocks form a channel")
}

/// Trace-nonincreasing map: a channel scaled by `s ∈ [0, 1]`.
pub fn subchannel<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> SuperOperator {
    let s: f64 = rng.random();
    let v = isometry(rng, k * d, d);
    let kraus = (0..k)
        .map(|i| v.rows(i * d, d).into_owned().scale(s.sqrt()))
        .collect();
    SuperOperator::new(kraus).expect("scaled channel is trace-nonincreasing")
}

/// Two-outcome measurement from a `2d × d` isometry.
pub fn measurement<R: Rng + ?Sized>(rng: &mut R, d: usize) -> TerminationMeasurement {
    let v = isometry(rng, 2 * d, d);
    TerminationMeasurement::new(v.rows(0, d).into_owned(), v.rows(d, d).into_owned())
        .expect("isometry blocks form a measurement")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let v = gaussian_vector(rng, d).normalize();
    DensityOperator::pure(v.as_slice()).expect("normalized vector")
}

/// Full-rank mixed state `GG^†/tr(GG^†)`.
pub fn mixed_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, d, d);
    let a = &g * g.adjoint();
    let t = linalg::trace(&a).re;
    DensityOperator::new(hermitian_part(&a.unscale(t))).expect("normalized Wishart matrix")
}

/// Random Hermitian matrix with entries of order one.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    hermitian_part(&gaussian_matrix(rng, d, d))
}

/// Positive observable with largest eigenvalue one.
pub fn psd_observable<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Observable {
    let g = gaussian_matrix(rng, d, d);
    let a = hermitian_part(&(&g * g.adjoint()));
    let top = linalg::max_eigenvalue(&a);
    Observable::new(a.unscale(top)).expect("scaled Wishart matrix")
}

pub fn hermitian_observable<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Observable {
    Observable::new(hermitian(rng, d)).expect("Hermitian by construction")
}

/// `F_j = Σ_i U_ji E_i` for a Haar-random `U`.
pub fn remix_kraus<R: Rng + ?Sized>(rng: &mut R, kraus: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let k = kraus.len();
    let u = unitary(rng, k);
    (0..k)
        .map(|j| {
            kraus
                .iter()
                .enumerate()
                .fold(linalg::zeros(kraus[0].nrows()), |acc, (i, e)| {
                    acc + e * u[(j, i)]
                })
        })
        .collect()
}

/// Random channel body with random measurement.
pub fn scheme<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ProgramScheme {
    let k = rng.random_range(1..=d + 1);
    ProgramScheme::new(channel(rng, d, k), measurement(rng, d)).expect("valid scheme")
}

pub fn program<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumProgram {
    let s = scheme(rng, d);
    let rho = if rng.random::<bool>() {
        pure_state(rng, d)
    } else {
        mixed_state(rng, d)
    };
    s.with_initial_state(rho).expect("normalized state")
}

/// Halts on `|0⟩`; the loop body mixes unitaries that fix `|0⟩` and act on
/// the rest, so the orthogonal complement never halts and `M` has unit-circle
/// eigenvalues.
pub fn trapping_scheme<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> ProgramScheme {
    assert!(d >= 2);
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| {
            let mut u = linalg::zeros(d);
            u[(0, 0)] = c64(1.0, 0.0);
            u.view_mut((1, 1), (d - 1, d - 1))
                .copy_from(&unitary(rng, d - 1));
            u.scale((w / total).sqrt())
        })
        .collect();
    ProgramScheme::new(
        SuperOperator::new(kraus).expect("mixture of unitaries"),
        TerminationMeasurement::computational(d, &[0]),
    )
    .expect("valid scheme")
}

/// Halts on `|0⟩` and traps `|d-1⟩`: each Kraus operator is a weighted
/// `U ⊕ e^{iθ}` with `U` acting on `|0⟩..|d-2⟩`. For `d ≥ 3` part of the
/// non-halting mass leaks into `|0⟩`, so halting and trapping coexist.
pub fn leaky_trap_scheme<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> ProgramScheme {
    assert!(d >= 2);
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| {
            let mut u = linalg::zeros(d);
            u.view_mut((0, 0), (d - 1, d - 1))
                .copy_from(&unitary(rng, d - 1));
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            u[(d - 1, d - 1)] = C64::from_polar(1.0, theta);
            u.scale((w / total).sqrt())
        })
        .collect();
    ProgramScheme::new(
        SuperOperator::new(kraus).expect("mixture of unitaries"),
        TerminationMeasurement::computational(d, &[0]),
    )
    .expect("valid scheme")
}

/// `|k⟩ ↦ e^{iθ_k}|k-1⟩` (and `|0⟩ ↦ |d-1⟩`) with halting on `|0⟩`: every
/// input halts within `d` steps.
pub fn shift_scheme<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ProgramScheme {
    let mut u = linalg::zeros(d);
    for k in 0..d {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        u[((k + d - 1) % d, k)] = C64::from_polar(1.0, theta);
    }
    ProgramScheme::new(
        SuperOperator::conjugation(u).expect("unitary"),
        TerminationMeasurement::computational(d, &[0]),
    )
    .expect("valid scheme")
}
