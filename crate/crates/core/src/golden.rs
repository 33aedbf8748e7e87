// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reference values for seeded random programs, stored as JSON.
//!
//! Regeneration is explicit (`qmc regen-goldens`) and sums the series to a
//! tighter tail and twice the step budget of a normal run. Checking recomputes
//! with normal settings and compares.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelFile;
use crate::oracle::oracle_expectation;
use crate::random;
use crate::spectral::{build_representation, expectation_closed_form, RunningTime};
use crate::termination::check_program_termination;
use crate::tolerance::{SeriesOptions, Tolerances};

pub const FORMAT_VERSION: u32 = 1;
pub const GOLDEN_OBSERVABLE: &str = "P";
/// Seeds tried for the random instances; non-contracting draws are skipped.
pub const GOLDEN_SEEDS: std::ops::Range<u64> = 1..13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub name: String,
    pub model_hash: String,
    pub model: ModelFile,
    pub observable: String,
    pub series_options: SeriesOptions,
    pub expectation: f64,
    pub running_time: RunningTime,
    pub n_used: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub format_version: u32,
    pub records: Vec<GoldenRecord>,
}

impl GoldenFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Model(format!("malformed golden file: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("golden file serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::Model(format!("cannot write {}: {e}", path.display())))
    }
}

/// Series settings used for regeneration.
pub fn regeneration_options() -> SeriesOptions {
    let d = SeriesOptions::default();
    SeriesOptions {
        tail_tol: d.tail_tol * 1e-2,
        n_max: d.n_max * 2,
    }
}

/// Seeded `d = 2` programs with random positive observables.
pub fn random_instances() -> Vec<(String, ModelFile)> {
    GOLDEN_SEEDS
        .filter_map(|seed| {
            let mut rng = random::rng(seed);
            let prog = random::program(&mut rng, 2);
            let p = random::psd_observable(&mut rng, 2);
            let rep = build_representation(prog.scheme()).ok()?;
            let verdict = check_program_termination(&rep, prog.initial_state()).ok()?;
            if !verdict.almost_terminates || rep.spectral.spectral_radius() > 0.999 {
                return None;
            }
            let model = ModelFile::from_scheme(prog.scheme(), Some(prog.initial_state()))
                .with_observable(GOLDEN_OBSERVABLE, &p);
            Some((format!("random-d2-seed{seed}"), model))
        })
        .collect()
}

pub fn record(
    name: &str,
    model: &ModelFile,
    observable: &str,
    opts: &SeriesOptions,
) -> Result<GoldenRecord> {
    let tol = Tolerances::default();
    let prog = model.program(&tol)?;
    let p = model.observable(observable, &tol)?;
    let r = oracle_expectation(&prog, &p, opts)?;
    Ok(GoldenRecord {
        name: name.to_string(),
        model_hash: model.hash(),
        model: model.clone(),
        observable: observable.to_string(),
        series_options: *opts,
        expectation: r.expectation_series,
        running_time: r.running_time_series,
        n_used: r.n_used,
        residual: r.residual,
    })
}

/// Recomputes every golden value from scratch.
pub fn regenerate(extra: &[(String, ModelFile, String)]) -> Result<GoldenFile> {
    let opts = regeneration_options();
    let mut records = Vec::new();
    for (name, model) in random_instances() {
        records.push(record(&name, &model, GOLDEN_OBSERVABLE, &opts)?);
    }
    for (name, model, obs) in extra {
        records.push(record(name, model, obs, &opts)?);
    }
    Ok(GoldenFile {
        format_version: FORMAT_VERSION,
        records,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub name: String,
    pub what: String,
}

/// Recomputes each record with default settings: the model hash must match,
/// and the series and closed-form expectations must lie within `tol` of the
/// stored value, as must finite running times.
pub fn compare(file: &GoldenFile, tol: f64) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    let mut push = |name: &str, what: String| {
        out.push(Mismatch {
            name: name.to_string(),
            what,
        })
    };
    for rec in &file.records {
        if rec.model.hash() != rec.model_hash {
            push(
                &rec.name,
                format!(
                    "model hash {} != stored {}",
                    rec.model.hash(),
                    rec.model_hash
                ),
            );
        }
        let fresh = record(
            &rec.name,
            &rec.model,
            &rec.observable,
            &SeriesOptions::default(),
        )?;
        if (fresh.expectation - rec.expectation).abs() > tol {
            push(
                &rec.name,
                format!(
                    "series expectation {} vs {}",
                    fresh.expectation, rec.expectation
                ),
            );
        }
        let tolerances = Tolerances::default();
        let prog = rec.model.program(&tolerances)?;
        let p = rec.model.observable(&rec.observable, &tolerances)?;
        let rep = build_representation(prog.scheme())?;
        let closed = expectation_closed_form(&rep, prog.initial_state(), &p)?;
        if (closed - rec.expectation).abs() > tol {
            push(
                &rec.name,
                format!("closed form {closed} vs {}", rec.expectation),
            );
        }
        match (fresh.running_time, rec.running_time) {
            (RunningTime::Finite(a), RunningTime::Finite(b))
                if (a - b).abs() <= tol * b.abs().max(1.0) => {}
            (RunningTime::Infinite { .. }, RunningTime::Infinite { .. }) => {}
            (a, b) => push(&rec.name, format!("running time {a} vs {b}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        let a = random_instances();
        let b = random_instances();
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
}
