// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Least fixed-point invariant and its three side conditions.

use qmarkov::prelude::*;
use qmarkov::random;

fn main() -> Result<()> {
    let mut rng = random::rng(3);
    let prog = random::program(&mut rng, 3);
    let p = random::psd_observable(&mut rng, 3);
    let cert = least_fixed_point_q(&prog, &p, &IterationOptions::default())?;
    let rep = build_representation(prog.scheme())?;
    let cond = check_conditions(&prog, &cert, &ConditionOptions::default(), Some(&rep))?;
    println!(
        "iterations {} converged {}",
        cert.iterations, cert.converged
    );
    println!("qv1 {} ({:.3e})", cond.qv1.holds, cond.qv1.value);
    println!("qv2 {} ({:.3e})", cond.qv2.holds, cond.qv2.value);
    println!("qv3 {} (tail {:.3e})", cond.qv3.holds, cond.qv3.tail);
    let v = expectation_via_invariant(&prog, &cert, &cond)?;
    println!("tr(P rho*) = {:.12} ({:?})", v.value, v.status);
    Ok(())
}
