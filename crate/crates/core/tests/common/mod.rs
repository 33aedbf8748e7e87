// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qmarkov::prelude::*;
use qmarkov::random;

/// Flip with probability `1 - p`, halt when the qubit reads 0.
pub fn bit_flip(p: f64) -> ProgramScheme {
    let body = SuperOperator::new(vec![
        linalg::identity(2).scale(p.sqrt()),
        linalg::pauli_x().scale((1.0 - p).sqrt()),
    ])
    .unwrap();
    ProgramScheme::new(body, TerminationMeasurement::computational(2, &[0])).unwrap()
}

pub fn x_flip() -> ProgramScheme {
    ProgramScheme::new(
        SuperOperator::new(vec![linalg::pauli_x()]).unwrap(),
        TerminationMeasurement::computational(2, &[0]),
    )
    .unwrap()
}

pub fn qubit(alpha: C64, beta: C64) -> DensityOperator {
    DensityOperator::pure(&[alpha, beta]).unwrap()
}

pub fn p0() -> Observable {
    Observable::new(linalg::ket_bra(2, 0, 0)).unwrap()
}

/// Generic schemes mostly, plus ones with unit-circle eigenvalues and nilpotent ones.
pub fn mixed_scheme(rng: &mut random::InstanceRng, i: usize, d: usize) -> ProgramScheme {
    match i % 10 {
        0 => random::trapping_scheme(rng, d, 1 + i % 3),
        1 => random::leaky_trap_scheme(rng, d, 1 + i % 3),
        2 => random::shift_scheme(rng, d),
        _ => random::scheme(rng, d),
    }
}

/// Three independent estimates of `tr(P ρ*)`: series, invariant, closed form.
pub fn three_methods(prog: &QuantumProgram, p: &Observable) -> Result<[f64; 3]> {
    let series = terminal_state_series(prog, &SeriesOptions::default());
    let rep = build_representation(prog.scheme())?;
    let cert = least_fixed_point_q(prog, p, &IterationOptions::default())?;
    let cond = check_conditions(prog, &cert, &ConditionOptions::default(), Some(&rep))?;
    let inv = expectation_via_invariant(prog, &cert, &cond)?;
    let closed = expectation_closed_form(&rep, prog.initial_state(), p)?;
    Ok([series.rho_star.expectation(p), inv.value, closed])
}

pub fn max_pairwise(v: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            worst = worst.max((v[i] - v[j]).abs());
        }
    }
    worst
}
