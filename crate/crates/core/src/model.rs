// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON model files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "kraus": [[[[0.7071, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071, 0.0]]], ...],
//!   "m0": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
//!   "m1": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
//!   "rho0": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
//!   "observables": { "P0": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]] },
//!   "options": { "tail_tol": 1e-12 }
//! }
//! ```
//!
//! Complex entries are `[re, im]`, matrices are row-major nested arrays.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{DensityOperator, Observable, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};
use crate::program::{ProgramScheme, QuantumProgram, TerminationMeasurement};
use crate::tolerance::{IterationOptions, SeriesOptions, Tolerances};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_unit: Option<f64>,
    /// Agreement tolerance between methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dim: usize,
    pub kraus: Vec<MatrixData>,
    pub m0: MatrixData,
    pub m1: MatrixData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<MatrixData>,
    #[serde(default)]
    pub observables: BTreeMap<String, MatrixData>,
    #[serde(default)]
    pub options: ModelOptions,
}

/// Fully resolved run options: model defaults overridden by command-line flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub tolerances: Tolerances,
    pub series: SeriesOptions,
    pub iteration: IterationOptions,
    /// Maximum allowed pairwise difference between methods.
    pub agreement_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            series: SeriesOptions::default(),
            iteration: IterationOptions::default(),
            agreement_tol: 1e-6,
        }
    }
}

impl RunOptions {
    /// `overrides` wins over `base`, which wins over the defaults.
    pub fn resolve(base: &ModelOptions, overrides: &ModelOptions) -> Self {
        let mut out = Self::default();
        for o in [base, overrides] {
            if let Some(v) = o.tail_tol {
                out.series.tail_tol = v;
            }
            if let Some(v) = o.n_max {
                out.series.n_max = v;
                out.iteration.n_max = v;
            }
            if let Some(v) = o.eps_unit {
                out.tolerances.eps_unit = v;
            }
            if let Some(v) = o.tol {
                out.agreement_tol = v;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tail_tol", self.series.tail_tol),
            ("eps_unit", self.tolerances.eps_unit),
            ("tol", self.agreement_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Model(format!(
                    "option {name} must be a positive number, got {v}"
                )));
            }
        }
        if self.series.n_max == 0 {
            return Err(Error::Model("option n_max must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn matrix_to_data(a: &ComplexMatrix) -> MatrixData {
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols())
                .map(|j| [a[(i, j)].re, a[(i, j)].im])
                .collect()
        })
        .collect()
}

fn data_to_matrix(data: &MatrixData, dim: usize, field: &str) -> Result<ComplexMatrix> {
    if data.len() != dim || data.iter().any(|row| row.len() != dim) {
        let cols = data.first().map_or(0, Vec::len);
        return Err(Error::Model(format!(
            "{field}: expected a {dim}x{dim} matrix, found {}x{cols}",
            data.len()
        )));
    }
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| c64(data[i][j][0], data[i][j][1]));
    if !crate::linalg::is_finite(&m) {
        return Err(Error::Model(format!("{field}: non-finite entry")));
    }
    Ok(m)
}

fn context(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Model(msg) => Error::Model(msg),
        other => Error::Model(format!("{field}: {other}")),
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Model(format!("malformed model file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Model(format!("cannot write {}: {e}", path.display())))
    }

    /// SHA-256 of the compact serialization, hex encoded.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("model serializes");
        Sha256::digest(compact.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn from_scheme(scheme: &ProgramScheme, rho0: Option<&DensityOperator>) -> Self {
        Self {
            description: None,
            dim: scheme.dim(),
            kraus: scheme.body().kraus().iter().map(matrix_to_data).collect(),
            m0: matrix_to_data(scheme.measurement().m0()),
            m1: matrix_to_data(scheme.measurement().m1()),
            rho0: rho0.map(|r| matrix_to_data(r.matrix())),
            observables: BTreeMap::new(),
            options: ModelOptions::default(),
        }
    }

    pub fn with_observable(mut self, name: &str, o: &Observable) -> Self {
        self.observables
            .insert(name.to_string(), matrix_to_data(o.matrix()));
        self
    }

    pub fn run_options(&self, overrides: &ModelOptions) -> Result<RunOptions> {
        let opts = RunOptions::resolve(&self.options, overrides);
        opts.validate()?;
        Ok(opts)
    }

    pub fn scheme(&self, tol: &Tolerances) -> Result<ProgramScheme> {
        if self.dim == 0 {
            return Err(Error::Model("dim must be at least 1".into()));
        }
        if self.kraus.is_empty() {
            return Err(Error::Model(
                "kraus: at least one Kraus operator is required".into(),
            ));
        }
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| data_to_matrix(k, self.dim, &format!("kraus[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let body = SuperOperator::with_tolerances(kraus, tol).map_err(context("kraus"))?;
        let m0 = data_to_matrix(&self.m0, self.dim, "m0")?;
        let m1 = data_to_matrix(&self.m1, self.dim, "m1")?;
        let meas =
            TerminationMeasurement::with_tolerances(m0, m1, tol).map_err(context("m0/m1"))?;
        ProgramScheme::with_tolerances(body, meas, tol).map_err(context("kraus"))
    }

    pub fn initial_state(&self, tol: &Tolerances) -> Result<DensityOperator> {
        let data = self
            .rho0
            .as_ref()
            .ok_or_else(|| Error::Model("rho0: missing initial state".into()))?;
        let m = data_to_matrix(data, self.dim, "rho0")?;
        DensityOperator::with_tolerances(m, tol).map_err(context("rho0"))
    }

    pub fn program(&self, tol: &Tolerances) -> Result<QuantumProgram> {
        let scheme = self.scheme(tol)?;
        scheme
            .with_initial_state(self.initial_state(tol)?)
            .map_err(context("rho0"))
    }

    pub fn observable(&self, name: &str, tol: &Tolerances) -> Result<Observable> {
        let data = self.observables.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.observables.keys().map(String::as_str).collect();
            Error::Model(format!(
                "observable {name:?} not found (available: {})",
                known.join(", ")
            ))
        })?;
        let field = format!("observables.{name}");
        let m = data_to_matrix(data, self.dim, &field)?;
        Observable::with_tolerances(m, tol).map_err(context(&field))
    }
}
