// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mean number of loop iterations: closed form against the step series.

use qmarkov::prelude::*;

fn main() -> Result<()> {
    let beta2: f64 = 0.64;
    let psi = [c64((1.0 - beta2).sqrt(), 0.0), c64(beta2.sqrt(), 0.0)];
    for p in [0.0_f64, 0.25, 0.5, 0.9, 1.0] {
        let body = SuperOperator::new(vec![
            linalg::identity(2).scale(p.sqrt()),
            linalg::pauli_x().scale((1.0 - p).sqrt()),
        ])?;
        let scheme = ProgramScheme::new(body, TerminationMeasurement::computational(2, &[0]))?;
        let rep = build_representation(&scheme)?;
        let prog = scheme.with_initial_state(DensityOperator::pure(&psi)?)?;
        let closed = average_running_time(&rep, prog.initial_state())?;
        let series =
            oracle_expectation(&prog, &Observable::identity(2), &SeriesOptions::default())?;
        println!(
            "p = {p:<4}  closed {closed}  series {}",
            series.running_time_series
        );
    }
    Ok(())
}
