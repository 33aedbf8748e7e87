// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Termination probability of the bit flip loop, three ways.

use qmarkov::prelude::*;

fn main() -> Result<()> {
    let p: f64 = 0.3;
    let body = SuperOperator::new(vec![
        linalg::identity(2).scale(p.sqrt()),
        linalg::pauli_x().scale((1.0 - p).sqrt()),
    ])?;
    let scheme = ProgramScheme::new(body, TerminationMeasurement::computational(2, &[0]))?;
    let psi = [c64(0.6, 0.0), c64(0.0, 0.8)];
    let prog = scheme.with_initial_state(DensityOperator::pure(&psi)?)?;
    let halt = Observable::identity(2);

    let series = terminal_state_series(&prog, &SeriesOptions::default());
    let cert = least_fixed_point_q(&prog, &halt, &IterationOptions::default())?;
    let rep = build_representation(prog.scheme())?;
    let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), Some(&rep))?;
    let inv = expectation_via_invariant(&prog, &cert, &cond)?;
    let closed = expectation_closed_form(&rep, prog.initial_state(), &halt)?;

    println!(
        "series     {:.12} after {} steps",
        series.rho_star.trace(),
        series.n_used
    );
    println!("invariant  {:.12} ({:?})", inv.value, inv.status);
    println!("closed     {closed:.12}");
    Ok(())
}
