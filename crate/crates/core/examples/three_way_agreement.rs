// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Series, invariant and closed form on a batch of random programs.

use qmarkov::prelude::*;
use qmarkov::random;

fn main() -> Result<()> {
    let mut rng = random::rng(2026);
    let mut shown = 0;
    while shown < 8 {
        let prog = random::program(&mut rng, 2);
        let p = random::psd_observable(&mut rng, 2);
        let rep = build_representation(prog.scheme())?;
        if !check_program_termination(&rep, prog.initial_state())?.almost_terminates {
            continue;
        }
        shown += 1;
        let series = oracle_expectation(&prog, &p, &SeriesOptions::default())?;
        let cert = least_fixed_point_q(&prog, &p, &IterationOptions::default())?;
        let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), Some(&rep))?;
        let inv = expectation_via_invariant(&prog, &cert, &cond)?.value;
        let closed = expectation_closed_form(&rep, prog.initial_state(), &p)?;
        let s = series.expectation_series;
        let spread = (s - inv)
            .abs()
            .max((s - closed).abs())
            .max((inv - closed).abs());
        println!("{s:.10}  {inv:.10}  {closed:.10}  spread {spread:.1e}");
    }
    Ok(())
}
