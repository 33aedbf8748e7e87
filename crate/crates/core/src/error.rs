// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("a super-operator needs at least one Kraus operator")]
    EmptyKraus,

    #[error(
        "Kraus operators are not sub-normalized: sum of E_i^dag E_i has eigenvalue {eigenvalue:.3e} > 1"
    )]
    NotSubNormalized { eigenvalue: f64 },

    #[error("loop body is not trace-preserving: ||sum E_i^dag E_i - I||_max = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },

    #[error("termination measurement is incomplete: ||M0^dag M0 + M1^dag M1 - I||_max = {deviation:.3e}")]
    IncompleteMeasurement { deviation: f64 },

    #[error("matrix is not Hermitian: ||A - A^dag||_max = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} is out of range for a (partial) density operator")]
    InvalidTrace { trace: f64 },

    #[error("eigensolver did not converge (dim {dim}, ||A||_F = {norm:.3e})")]
    EigenSolver { dim: usize, norm: f64 },

    #[error(
        "unit-modulus eigenvalue {re:.6}{im:+.6}i is not semisimple (residual {residual:.3e}); \
         unit-circle Jordan blocks of a valid program are 1x1, check that the loop body is trace-preserving"
    )]
    NotSemisimple { re: f64, im: f64, residual: f64 },

    #[error("spectral radius {radius} exceeds 1; input is not a valid program")]
    SpectralRadius { radius: f64 },

    #[error("I - N is singular to working precision")]
    SingularResolvent,

    #[error("expectation has imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },

    #[error("linear fixed-point solve needs spectral radius < 1 - eps_unit, found {radius}")]
    NotContracting { radius: f64 },

    #[error("candidate Q violates the invariance condition: residual {residual:.3e}")]
    InvariantViolated { residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("model: {0}")]
    Model(String),
}
