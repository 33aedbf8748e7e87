// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact and almost-sure termination.
//!
//! A program halts exactly when `Mⁿ x = 0` for some `n`, with
//! `x = (ρ₀ ⊗ I)|Φ⟩`, and almost surely when `Mⁿ x → 0`. The latter is decided
//! by the unit-circle projector: `P_u x = 0`. Schemes use `x = |Φ⟩`.

use serde::{Deserialize, Serialize};

use crate::channel::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{identity, ComplexMatrix, ComplexVector};
use crate::spectral::ProgramRepresentation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminationVerdict {
    pub terminates: bool,
    /// First step after which the non-termination probability is zero.
    pub terminates_at: Option<usize>,
    pub almost_terminates: bool,
    /// `||P_u x||`.
    pub unit_overlap_norm: f64,
    /// Largest power of `M` inspected.
    pub nilpotent_check_power: usize,
}

/// `Mⁿ x` counts as zero when `||Mⁿ x|| ≤ tol * ||Mⁿ||_F * ||x||`; the matrix
/// power in the scale keeps strongly contracting (but not nilpotent) `M` from
/// passing as terminating.
fn first_vanishing_power(
    m: &ComplexMatrix,
    x: &ComplexVector,
    max_power: usize,
    tol: f64,
) -> Option<usize> {
    let n = m.nrows();
    let x_norm = x.norm();
    let mut power = identity(n);
    for k in 1..=max_power {
        power = m * &power;
        let y = &power * x;
        let scale = power.norm() * x_norm;
        if y.norm() <= tol * scale || y.norm() == 0.0 {
            return Some(k);
        }
    }
    None
}

fn verdict_for(
    rep: &ProgramRepresentation,
    x: &ComplexVector,
    max_power: usize,
) -> TerminationVerdict {
    let tol = rep.tolerances.zero_vec;
    let terminates_at = first_vanishing_power(&rep.m, x, max_power, tol);
    let unit_overlap_norm = rep.unit_overlap(x);
    let spectral_almost = unit_overlap_norm <= tol.max(1e-9) * x.norm();
    TerminationVerdict {
        terminates: terminates_at.is_some(),
        terminates_at,
        almost_terminates: terminates_at.is_some() || spectral_almost,
        unit_overlap_norm,
        nilpotent_check_power: max_power,
    }
}

/// Termination of the program started in `rho0`, iterating powers up to `d²`.
pub fn check_program_termination(
    rep: &ProgramRepresentation,
    rho0: &DensityOperator,
) -> Result<TerminationVerdict> {
    let x = rep.state_vector(rho0)?;
    Ok(verdict_for(rep, &x, rep.dim2))
}

/// Termination for every initial state.
///
/// Route one inspects `M^k |Φ⟩` with `k` the nilpotent index bound at zero and
/// the unit-circle overlap of `|Φ⟩`. Route two analyses the program started
/// in `I/d`. The two must agree.
pub fn check_scheme_termination(rep: &ProgramRepresentation) -> Result<TerminationVerdict> {
    let k = rep.spectral.zero_nilpotent_index_bound.max(1);
    let by_phi = verdict_for(rep, &rep.phi, k);
    let by_mixed = check_program_termination(rep, &DensityOperator::maximally_mixed(rep.dim))?;
    if by_phi.terminates != by_mixed.terminates
        || by_phi.almost_terminates != by_mixed.almost_terminates
        || (by_phi.terminates && by_phi.terminates_at != by_mixed.terminates_at)
    {
        return Err(Error::Inconsistent(format!(
            "scheme verdict via |Phi> ({by_phi:?}) disagrees with verdict via I/d ({by_mixed:?})"
        )));
    }
    Ok(by_phi)
}
