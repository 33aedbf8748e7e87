// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical thresholds shared by every analysis.
//!
//! Defaults are sized for double precision with state dimension up to about 8
//! (representation matrices up to 64x64). Thresholds marked "scaled" are
//! multiplied by a matrix norm at the point of use.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity, `||A - A^dag||_max`.
    pub herm: f64,
    /// Eigenpair residuals (scaled).
    pub eig: f64,
    /// Distance from the unit circle below which an eigenvalue counts as unit-modulus.
    pub eps_unit: f64,
    /// Idempotency / commutation of spectral projectors (scaled).
    pub proj: f64,
    /// Generic entrywise comparisons.
    pub num: f64,
    /// Trace preservation and measurement completeness.
    pub tp: f64,
    /// Relative eigenvalue distance for grouping into one cluster (scaled by spectral radius).
    pub cluster: f64,
    /// Relative norm below which a vector counts as zero.
    pub zero_vec: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            eig: 1e-8,
            eps_unit: 1e-7,
            proj: 1e-6,
            num: 1e-9,
            tp: 1e-9,
            cluster: 1e-6,
            zero_vec: 1e-9,
        }
    }
}

/// Truncation policy for the series evaluation of the terminal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    /// Stop once the non-termination mass drops below this.
    pub tail_tol: f64,
    pub n_max: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            n_max: 1_000_000,
        }
    }
}

/// Stopping rule for the monotone fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOptions {
    /// Stop once `||Q_{n+1} - Q_n||_max` is below this.
    pub tol: f64,
    pub n_max: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            n_max: 1_000_000,
        }
    }
}
