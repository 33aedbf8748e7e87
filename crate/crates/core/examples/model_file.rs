// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Building a model file in code, saving it and reading it back.

use qmarkov::commands::{self, Method};
use qmarkov::prelude::*;

fn main() -> Result<()> {
    let h = linalg::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).unscale(2.0_f64.sqrt());
    let body = SuperOperator::conjugation(h)?;
    let scheme = ProgramScheme::new(body, TerminationMeasurement::computational(2, &[0]))?;
    let model = ModelFile::from_scheme(&scheme, Some(&DensityOperator::basis(2, 1)))
        .with_observable("Z", &Observable::new(linalg::pauli_z())?);

    let path = std::env::temp_dir().join("hadamard_loop.model");
    model.save(&path)?;
    let back = ModelFile::load(&path)?;
    println!("saved {} (sha256 {})", path.display(), back.hash());

    match commands::verify(&back, "Z", Method::All, &ModelOptions::default()) {
        Ok(report) => println!("{report}"),
        Err(f) => println!("failed with exit {}: {}", f.code, f.message),
    }
    Ok(())
}
