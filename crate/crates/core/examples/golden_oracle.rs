// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reference values from the brute-force oracle, checked against the closed form.

use qmarkov::golden;

fn main() -> qmarkov::Result<()> {
    let file = golden::regenerate(&[])?;
    for r in &file.records {
        println!(
            "{:<18} {:.12}  running time {}",
            r.name, r.expectation, r.running_time
        );
    }
    let mismatches = golden::compare(&file, 1e-7)?;
    println!(
        "{} records, {} mismatches",
        file.records.len(),
        mismatches.len()
    );
    Ok(())
}
