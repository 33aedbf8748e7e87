// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification reports: a JSON payload plus a plain-text table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::invariant::{ConditionReport, ExpectationStatus};
use crate::linalg::{SpectralData, C64};
use crate::model::RunOptions;
use crate::spectral::{ProgramRepresentation, RunningTime};
use crate::termination::TerminationVerdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_NONTERMINATION: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Series,
    Invariant,
    Spectral,
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodTag::Series => "series",
            MethodTag::Invariant => "invariant",
            MethodTag::Spectral => "spectral",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Program,
    Scheme,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_used: Option<usize>,
    /// Non-termination mass left by the series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_overlap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qv1: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qv2: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qv3: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<ExpectationStatus>,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(v) = self.n_used {
            parts.push(format!("n_used={v}"));
        }
        if let Some(v) = self.residual {
            parts.push(format!("residual={v:.3e}"));
        }
        if let Some(v) = self.iterations {
            parts.push(format!("iterations={v}"));
        }
        if let Some(v) = self.converged {
            parts.push(format!("converged={v}"));
        }
        if let Some(v) = self.margin {
            parts.push(format!("margin={v:.3e}"));
        }
        if let Some(v) = self.unit_overlap {
            parts.push(format!("unit_overlap={v:.3e}"));
        }
        for (name, v) in [("QV1", self.qv1), ("QV2", self.qv2), ("QV3", self.qv3)] {
            if let Some(v) = v {
                parts.push(format!("{name}={}", if v { "ok" } else { "FAIL" }));
            }
        }
        if let Some(s) = self.status {
            parts.push(format!("status={s:?}"));
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodValue {
    pub method: MethodTag,
    pub value: f64,
    pub tolerance: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDelta {
    pub first: MethodTag,
    pub second: MethodTag,
    pub delta: f64,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningTimeEntry {
    pub method: MethodTag,
    pub value: RunningTime,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminationEntry {
    pub scope: Scope,
    pub verdict: TerminationVerdict,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub unit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    /// Descending modulus, ties broken by descending real then imaginary part.
    pub eigenvalues: Vec<EigenRow>,
    pub spectral_radius: f64,
    pub margin: f64,
    pub unit_count: usize,
    /// Unit-circle eigenvalues passed the semisimplicity check.
    pub semisimple: bool,
    pub tolerance: f64,
}

impl SpectrumSummary {
    pub fn from_representation(rep: &ProgramRepresentation) -> Self {
        let mut eigenvalues = eigen_rows(&rep.spectral);
        sort_eigen_rows(&mut eigenvalues);
        Self {
            unit_count: eigenvalues.iter().filter(|r| r.unit).count(),
            eigenvalues,
            spectral_radius: rep.spectral.spectral_radius(),
            margin: rep.margin,
            semisimple: true,
            tolerance: rep.tolerances.eps_unit,
        }
    }
}

fn eigen_rows(s: &SpectralData) -> Vec<EigenRow> {
    s.eigenvalues
        .iter()
        .zip(&s.unit_circle_flags)
        .map(|(l, &unit): (&C64, &bool)| EigenRow {
            re: l.re,
            im: l.im,
            modulus: l.norm(),
            unit,
        })
        .collect()
}

pub fn sort_eigen_rows(rows: &mut [EigenRow]) {
    rows.sort_by(|a, b| {
        b.modulus
            .total_cmp(&a.modulus)
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub n: usize,
    pub p_n: f64,
    pub p_n_nontermination: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    /// `positive` or `negative` part of the observable.
    pub part: String,
    pub report: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub model_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    pub options: RunOptions,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<MethodValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<PairDelta>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub running_times: Vec<RunningTimeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination: Option<TerminationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub exit_code: i32,
}

impl VerificationReport {
    pub fn new(command: &str, model_hash: String, options: RunOptions) -> Self {
        Self {
            command: command.to_string(),
            model_hash,
            observable: None,
            options,
            expectations: Vec::new(),
            deltas: Vec::new(),
            conditions: Vec::new(),
            running_times: Vec::new(),
            termination: None,
            spectrum: None,
            steps: Vec::new(),
            warnings: Vec::new(),
            errors: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    pub fn expectation(&self, method: MethodTag) -> Option<f64> {
        self.expectations
            .iter()
            .find(|e| e.method == method)
            .map(|e| e.value)
    }

    pub fn running_time(&self, method: MethodTag) -> Option<RunningTime> {
        self.running_times
            .iter()
            .find(|e| e.method == method)
            .map(|e| e.value)
    }

    /// Raises the exit code; non-termination outranks disagreement.
    pub fn fail(&mut self, code: i32, message: String) {
        let rank = |c: i32| match c {
            EXIT_OK => 0,
            EXIT_DISAGREEMENT => 1,
            EXIT_NONTERMINATION => 2,
            EXIT_ERROR => 3,
            _ => 4,
        };
        if rank(code) > rank(self.exit_code) {
            self.exit_code = code;
        }
        self.errors.push(message);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command      {}", self.command)?;
        writeln!(f, "model        sha256:{}", self.model_hash)?;
        if let Some(o) = &self.observable {
            writeln!(f, "observable   {o}")?;
        }
        if !self.expectations.is_empty() {
            writeln!(
                f,
                "\n{:<10} {:>18} {:>10}  diagnostics",
                "method", "expectation", "tol"
            )?;
            for e in &self.expectations {
                writeln!(
                    f,
                    "{:<10} {:>18.12} {:>10.1e}  {}",
                    e.method.to_string(),
                    e.value,
                    e.tolerance,
                    e.diagnostics
                )?;
            }
        }
        if !self.deltas.is_empty() {
            writeln!(f, "\n{:<22} {:>12} {:>10}", "pair", "delta", "tol")?;
            for d in &self.deltas {
                let pair = format!("{} vs {}", d.first, d.second);
                let mark = if d.agree { "" } else { "  DISAGREE" };
                writeln!(
                    f,
                    "{pair:<22} {:>12.3e} {:>10.1e}{mark}",
                    d.delta, d.tolerance
                )?;
            }
        }
        for c in &self.conditions {
            let r = &c.report;
            writeln!(
                f,
                "\nconditions ({}): QV1 {} (value {:.9}), QV2 {} (residual {:.3e}), QV3 {} (tail {:.3e})",
                c.part,
                ok(r.qv1.holds),
                r.qv1.value,
                ok(r.qv2.holds),
                r.qv2.value,
                ok(r.qv3.holds),
                r.qv3.tail
            )?;
        }
        if !self.running_times.is_empty() {
            writeln!(f, "\n{:<10} {:>30} {:>10}", "method", "running time", "tol")?;
            for r in &self.running_times {
                writeln!(
                    f,
                    "{:<10} {:>30} {:>10.1e}",
                    r.method.to_string(),
                    r.value.to_string(),
                    r.tolerance
                )?;
            }
        }
        if let Some(t) = &self.termination {
            let v = &t.verdict;
            let scope = match t.scope {
                Scope::Program => "program",
                Scope::Scheme => "all initial states",
            };
            writeln!(f, "\ntermination ({scope})")?;
            match v.terminates_at {
                Some(n) => writeln!(f, "  terminates          yes, within {n} steps")?,
                None => writeln!(f, "  terminates          no")?,
            }
            writeln!(
                f,
                "  almost terminates   {}",
                if v.almost_terminates { "yes" } else { "no" }
            )?;
            writeln!(f, "  unit overlap        {:.3e}", v.unit_overlap_norm)?;
        }
        if let Some(s) = &self.spectrum {
            writeln!(
                f,
                "\nspectrum: radius {:.12}, margin {:.3e}, {} unit-circle eigenvalue(s), semisimple {}",
                s.spectral_radius,
                s.margin,
                s.unit_count,
                ok(s.semisimple)
            )?;
            writeln!(f, "{:>18} {:>18} {:>14}  unit", "re", "im", "|lambda|")?;
            for e in &s.eigenvalues {
                writeln!(
                    f,
                    "{:>18.12} {:>18.12} {:>14.10}  {}",
                    e.re,
                    e.im,
                    e.modulus,
                    if e.unit { "*" } else { "" }
                )?;
            }
        }
        if !self.steps.is_empty() {
            writeln!(
                f,
                "\n{:>8} {:>22} {:>22}",
                "n", "p_n", "p_n (nontermination)"
            )?;
            for s in &self.steps {
                writeln!(
                    f,
                    "{:>8} {:>22.15e} {:>22.15e}",
                    s.n, s.p_n, s.p_n_nontermination
                )?;
            }
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        write!(f, "exit code {}", self.exit_code)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(re: f64, im: f64) -> EigenRow {
        EigenRow {
            re,
            im,
            modulus: (re * re + im * im).sqrt(),
            unit: false,
        }
    }

    #[test]
    fn eigen_order() {
        let mut rows = vec![
            row(0.0, 0.0),
            row(0.0, 1.0),
            row(0.5, 0.0),
            row(1.0, 0.0),
            row(0.0, -1.0),
        ];
        sort_eigen_rows(&mut rows);
        let got: Vec<(f64, f64)> = rows.iter().map(|r| (r.re, r.im)).collect();
        assert_eq!(
            got,
            vec![(1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.5, 0.0), (0.0, 0.0)]
        );
    }

    #[test]
    fn nontermination_outranks_disagreement() {
        let mut r = VerificationReport::new("verify", String::new(), RunOptions::default());
        r.fail(EXIT_NONTERMINATION, "a".into());
        r.fail(EXIT_DISAGREEMENT, "b".into());
        assert_eq!(r.exit_code, EXIT_NONTERMINATION);
    }
}
