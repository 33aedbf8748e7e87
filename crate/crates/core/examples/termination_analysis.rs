// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact and almost-sure termination for a single input and for all inputs.

use qmarkov::prelude::*;

fn report(name: &str, scheme: &ProgramScheme) -> Result<()> {
    let rep = build_representation(scheme)?;
    let all = check_scheme_termination(&rep)?;
    let one = check_program_termination(&rep, &DensityOperator::basis(scheme.dim(), 1))?;
    println!(
        "{name:<10} all inputs: terminates {:?}, almost {} | from |1>: terminates {:?}, almost {}",
        all.terminates_at, all.almost_terminates, one.terminates_at, one.almost_terminates
    );
    Ok(())
}

fn main() -> Result<()> {
    let halt0 = || TerminationMeasurement::computational(2, &[0]);
    let flip = ProgramScheme::new(SuperOperator::conjugation(linalg::pauli_x())?, halt0())?;
    let idle = ProgramScheme::new(SuperOperator::identity(2), halt0())?;
    let noisy = ProgramScheme::new(
        SuperOperator::new(vec![
            linalg::identity(2).scale(0.5_f64.sqrt()),
            linalg::pauli_x().scale(0.5_f64.sqrt()),
        ])?,
        halt0(),
    )?;
    report("X flip", &flip)?;
    report("identity", &idle)?;
    report("noisy", &noisy)?;
    Ok(())
}
