// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Eigenvalues of the loop's matrix representation and the unit-circle projector.

use qmarkov::prelude::*;
use qmarkov::random;

fn main() -> Result<()> {
    let mut rng = random::rng(7);
    let scheme = random::trapping_scheme(&mut rng, 3, 2);
    let rep = build_representation(&scheme)?;
    println!("spectral radius {:.6}", rep.spectral.spectral_radius());
    for c in &rep.spectral.clusters {
        let tag = if c.unit { "unit" } else { "" };
        println!(
            "  {:>9.6} {:+.6}i  x{} {tag}",
            c.center.re,
            c.center.im,
            c.members.len()
        );
    }
    let pu = &rep.unit_projector;
    println!("||P_u^2 - P_u|| = {:.2e}", linalg::max_abs(&(pu * pu - pu)));
    println!("margin below the unit circle {:.6}", rep.margin);
    Ok(())
}
