//! Lab manifests and submission dispatch.
//!
//! Manifest format:
//!
//! ```text
//! {"id": "lab2", "title": "...", "mode": "STATE" | "DISTRIBUTION" | "CLASSIFIER",
//!  "reference": {"circuit": {...}} | {"probabilities": {"00": 0.5, ...}}
//!             | {"label": "BALANCED", "labels": ["CONSTANT", "BALANCED"]},
//!  "tolerance": 0.05, "shots_required": 4096}
//! ```
//!
//! `tolerance` and `shots_required` may be omitted; a DISTRIBUTION lab may
//! give a reference circuit, whose measured-qubit marginal becomes the
//! expected distribution.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{
    grade_classifier, grade_distribution, grade_state, validate_distribution, GradeReport,
};
use crate::circuit::{parse_circuit, parse_counts, Circuit};
use crate::error::{QlabError, Result};

pub const DEFAULT_TVD_TOLERANCE: f64 = 0.05;
pub const DEFAULT_SHOTS: u64 = 4096;
pub const DEFAULT_STATE_TOLERANCE: f64 = 1e-6;

const BUILTIN: [(&str, &str); 8] = [
    ("lab1.json", include_str!("../../labs/lab1.json")),
    ("lab2.json", include_str!("../../labs/lab2.json")),
    ("lab3.json", include_str!("../../labs/lab3.json")),
    ("lab4.json", include_str!("../../labs/lab4.json")),
    ("lab5.json", include_str!("../../labs/lab5.json")),
    ("lab6.json", include_str!("../../labs/lab6.json")),
    ("lab7.json", include_str!("../../labs/lab7.json")),
    ("lab8.json", include_str!("../../labs/lab8.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LabMode {
    State,
    Distribution,
    Classifier,
}

impl LabMode {
    pub fn name(self) -> &'static str {
        match self {
            LabMode::State => "STATE",
            LabMode::Distribution => "DISTRIBUTION",
            LabMode::Classifier => "CLASSIFIER",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabReference {
    /// Reference circuit; its final state (measurements dropped) is the target.
    Circuit(Circuit),
    /// Expected outcome probabilities.
    Probabilities(BTreeMap<String, f64>),
    /// Expected label and the full set of admissible labels.
    Label {
        expected: String,
        labels: Vec<String>,
    },
}

/// One lab: what is graded and against what.
#[derive(Debug, Clone, PartialEq)]
pub struct LabSpec {
    pub id: String,
    pub title: String,
    pub mode: LabMode,
    pub reference: LabReference,
    pub tolerance: f64,
    pub shots_required: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLab {
    id: String,
    title: String,
    mode: LabMode,
    reference: RawReference,
    tolerance: Option<f64>,
    shots_required: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    circuit: Option<serde_json::Value>,
    probabilities: Option<BTreeMap<String, f64>>,
    label: Option<String>,
    labels: Option<Vec<String>>,
}

impl LabSpec {
    /// Parse and validate a manifest. `source` names the document in errors.
    pub fn parse(text: &[u8], source: &str) -> Result<Self> {
        let raw: RawLab = serde_json::from_slice(text).map_err(|e| {
            QlabError::parse(
                format!("{source} line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let fail = |msg: String| QlabError::parse(format!("{source} lab {:?}", raw.id), msg);
        if raw.id.is_empty() {
            return Err(QlabError::parse(source.to_string(), "lab id is empty"));
        }
        let RawReference {
            circuit,
            probabilities,
            label,
            labels,
        } = raw.reference;
        let circuit = circuit
            .map(|v| {
                let bytes = serde_json::to_vec(&v).expect("json value serialize");
                parse_circuit(&bytes)
            })
            .transpose()
            .map_err(|e| fail(format!("reference circuit: {e}")))?;

        let reference = match (raw.mode, circuit, probabilities, label) {
            (LabMode::State, Some(c), None, None) if labels.is_none() => LabReference::Circuit(c),
            (LabMode::Distribution, Some(c), None, None) if labels.is_none() => {
                let measured = c.measured_qubits();
                let qubits: Vec<usize> = if measured.is_empty() {
                    (0..c.num_qubits()).collect()
                } else {
                    measured
                };
                let state = c
                    .without_measurements()
                    .run_state()
                    .map_err(|e| fail(e.to_string()))?;
                let probs = state
                    .marginal_probabilities(&qubits)
                    .map_err(|e| fail(e.to_string()))?;
                LabReference::Probabilities(probs)
            }
            (LabMode::Distribution, None, Some(p), None) if labels.is_none() => {
                validate_distribution(&p).map_err(|e| fail(e.to_string()))?;
                LabReference::Probabilities(p)
            }
            (LabMode::Classifier, None, None, Some(expected)) => {
                let labels = labels.unwrap_or_else(|| vec!["CONSTANT".into(), "BALANCED".into()]);
                if !labels.contains(&expected) {
                    return Err(fail(format!("label {expected:?} is not in {labels:?}")));
                }
                LabReference::Label { expected, labels }
            }
            (mode, ..) => {
                return Err(fail(format!(
                    "reference does not fit mode {}: STATE needs \"circuit\", DISTRIBUTION \
                     \"probabilities\" or \"circuit\", CLASSIFIER \"label\" (+ \"labels\")",
                    mode.name()
                )))
            }
        };
        let tolerance = raw.tolerance.unwrap_or(match raw.mode {
            LabMode::Distribution => DEFAULT_TVD_TOLERANCE,
            _ => DEFAULT_STATE_TOLERANCE,
        });
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(fail(format!("tolerance {tolerance} must be positive")));
        }
        let shots_required = raw.shots_required.unwrap_or(match raw.mode {
            LabMode::Distribution => DEFAULT_SHOTS,
            _ => 0,
        });
        Ok(LabSpec {
            id: raw.id,
            title: raw.title,
            mode: raw.mode,
            reference,
            tolerance,
            shots_required,
        })
    }

    /// Expected probabilities for DISTRIBUTION labs.
    pub fn expected_distribution(&self) -> Option<&BTreeMap<String, f64>> {
        match &self.reference {
            LabReference::Probabilities(p) => Some(p),
            _ => None,
        }
    }
}

/// The eight labs shipped with the library, ordered lab1…lab8.
pub fn builtin_labs() -> Vec<LabSpec> {
    BUILTIN
        .iter()
        .map(|(name, text)| LabSpec::parse(text.as_bytes(), name).expect("built-in manifest"))
        .collect()
}

/// Every `*.json` manifest directly inside `dir`, sorted by id.
pub fn load_labs_from_dir(dir: &Path) -> Result<Vec<LabSpec>> {
    let io = |e: std::io::Error| QlabError::parse(dir.display().to_string(), e.to_string());
    let mut labs = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") || !path.is_file() {
            continue;
        }
        let text = std::fs::read(&path)
            .map_err(|e| QlabError::parse(path.display().to_string(), e.to_string()))?;
        labs.push(LabSpec::parse(&text, &path.display().to_string())?);
    }
    labs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(labs)
}

pub fn find_lab<'a>(labs: &'a [LabSpec], id: &str) -> Option<&'a LabSpec> {
    labs.iter().find(|l| l.id == id)
}

/// Grade the submission file at `path`. Never panics on bad input.
pub fn run_lab(lab: &LabSpec, path: &Path) -> GradeReport {
    match std::fs::read(path) {
        Ok(bytes) => run_lab_bytes(lab, &bytes),
        Err(e) => GradeReport::invalid(format!("cannot read {}: {e}", path.display()))
            .with_lab_id(&lab.id),
    }
}

/// Grade an in-memory submission.
pub fn run_lab_bytes(lab: &LabSpec, bytes: &[u8]) -> GradeReport {
    grade_bytes(lab, bytes).with_lab_id(&lab.id)
}

fn grade_bytes(lab: &LabSpec, bytes: &[u8]) -> GradeReport {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return GradeReport::invalid("submission is empty");
    }
    match (&lab.reference, lab.mode) {
        (LabReference::Circuit(reference), LabMode::State) => {
            let submitted = match parse_circuit(bytes) {
                Ok(c) => c,
                Err(e) => return GradeReport::invalid(e.to_string()),
            };
            if submitted.num_qubits() != reference.num_qubits() {
                return GradeReport::invalid(format!(
                    "submission has {} qubits, the lab needs {}",
                    submitted.num_qubits(),
                    reference.num_qubits()
                ));
            }
            let states = submitted
                .without_measurements()
                .run_state()
                .and_then(|s| Ok((s, reference.without_measurements().run_state()?)));
            match states {
                Ok((s, r)) => grade_state(&s, &r, lab.tolerance),
                Err(e) => GradeReport::invalid(e.to_string()),
            }
        }
        (LabReference::Probabilities(expected), LabMode::Distribution) => match parse_counts(bytes)
        {
            Ok(counts) => grade_distribution(&counts, expected, lab.tolerance, lab.shots_required),
            Err(e) => GradeReport::invalid(e.to_string()),
        },
        (LabReference::Label { expected, labels }, LabMode::Classifier) => {
            let text = match std::str::from_utf8(bytes) {
                Ok(t) => t.trim(),
                Err(_) => return GradeReport::invalid("submission is not UTF-8"),
            };
            let label = if text.starts_with('"') {
                match serde_json::from_str::<String>(text) {
                    Ok(l) => l,
                    Err(e) => return GradeReport::invalid(format!("bad JSON string: {e}")),
                }
            } else {
                text.to_string()
            };
            grade_classifier(&label, expected, labels)
        }
        _ => GradeReport::invalid("lab reference does not match its mode"),
    }
}
