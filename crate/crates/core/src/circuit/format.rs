//! JSON file formats for circuits and counts.
//!
//! ```text
//! {"qubits": 2, "ops": [
//!   {"gate": "h", "targets": [0]},
//!   {"gate": "x", "targets": [1], "controls": [0]},
//!   {"measure": [0, 1]}
//! ]}
//! ```
//!
//! Gate names are lowercase, angles are radians. Oracles may be written as
//! `{"permutation": name, "register": [..], "map": [..], "phases": [[re, im], ..]}`.
//! Syntax and type errors report `line:column`; semantic errors report the
//! op's position in the list.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{counts_width, Circuit, CircuitOp, Counts, PermutationOp};
use crate::error::{QlabError, Result};
use crate::gate::{Gate, GateKind};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    qubits: usize,
    ops: Vec<RawOp>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOp {
    #[serde(skip_serializing_if = "Option::is_none", with = "gate_name")]
    #[serde(default)]
    gate: Option<GateKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    controls: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    register: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phases: Option<Vec<[f64; 2]>>,
}

mod gate_name {
    use super::GateKind;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(kind: &Option<GateKind>, s: S) -> Result<S::Ok, S::Error> {
        match kind {
            Some(k) => s.serialize_str(k.name()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<GateKind>, D::Error> {
        let name = String::deserialize(d)?;
        name.parse()
            .map(Some)
            .map_err(|_| de::Error::custom(format!("unknown gate {name:?}")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounts {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

fn json_error(source: &str, e: serde_json::Error) -> QlabError {
    QlabError::parse(
        format!("{source} line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

fn op_error(index: usize, e: QlabError) -> QlabError {
    let message = match e {
        QlabError::InvalidInput(m) => m,
        other => other.to_string(),
    };
    QlabError::parse(format!("circuit ops[{index}]"), message)
}

impl RawOp {
    fn into_op(self) -> Result<CircuitOp> {
        let RawOp {
            gate,
            targets,
            controls,
            angle,
            measure,
            permutation,
            register,
            map,
            phases,
        } = self;
        let gate_fields = targets.is_some() || controls.is_some() || angle.is_some();
        let perm_fields = register.is_some() || map.is_some() || phases.is_some();
        match (gate, measure, permutation) {
            (Some(kind), None, None) if !perm_fields => {
                let targets =
                    targets.ok_or_else(|| QlabError::input("gate op is missing \"targets\""))?;
                Ok(CircuitOp::Gate(Gate::new(
                    kind,
                    targets,
                    controls.unwrap_or_default(),
                    angle,
                )?))
            }
            (None, Some(qubits), None) if !gate_fields && !perm_fields => {
                Ok(CircuitOp::Measure(qubits))
            }
            (None, None, Some(name)) if !gate_fields => {
                let register = register
                    .ok_or_else(|| QlabError::input("permutation op is missing \"register\""))?;
                let map =
                    map.ok_or_else(|| QlabError::input("permutation op is missing \"map\""))?;
                let op = PermutationOp::new(name, register, map)?;
                let op = match phases {
                    Some(p) => {
                        op.with_phases(p.iter().map(|&[re, im]| Complex64::new(re, im)).collect())?
                    }
                    None => op,
                };
                Ok(CircuitOp::Permutation(op))
            }
            _ => Err(QlabError::input(
                "op must be exactly one of a gate, a measurement or a permutation",
            )),
        }
    }

    fn from_op(op: &CircuitOp) -> Self {
        match op {
            CircuitOp::Gate(g) => RawOp {
                gate: Some(g.kind()),
                targets: Some(g.targets().to_vec()),
                controls: (!g.controls().is_empty()).then(|| g.controls().to_vec()),
                angle: g.angle(),
                ..Default::default()
            },
            CircuitOp::Measure(q) => RawOp {
                measure: Some(q.clone()),
                ..Default::default()
            },
            CircuitOp::Permutation(p) => RawOp {
                permutation: Some(p.name().to_string()),
                register: Some(p.register().to_vec()),
                map: Some(p.map().to_vec()),
                phases: p
                    .phases()
                    .map(|ph| ph.iter().map(|c| [c.re, c.im]).collect()),
                ..Default::default()
            },
        }
    }
}

/// Parse a circuit document.
pub fn parse_circuit(text: &[u8]) -> Result<Circuit> {
    let raw: RawCircuit = serde_json::from_slice(text).map_err(|e| json_error("circuit", e))?;
    let mut circuit = Circuit::new(raw.qubits)
        .map_err(|e| QlabError::parse("circuit \"qubits\"", e.to_string()))?;
    for (i, op) in raw.ops.into_iter().enumerate() {
        let op = op.into_op().map_err(|e| op_error(i, e))?;
        circuit.append(op).map_err(|e| op_error(i, e))?;
    }
    Ok(circuit)
}

pub(super) fn serialize_circuit(circuit: &Circuit) -> String {
    let raw = RawCircuit {
        qubits: circuit.num_qubits(),
        ops: circuit.ops().iter().map(RawOp::from_op).collect(),
    };
    serde_json::to_string(&raw).expect("circuit serialize")
}

/// Parse a counts document `{"shots": N, "counts": {bits: n, …}}`.
pub fn parse_counts(text: &[u8]) -> Result<Counts> {
    let raw: RawCounts = serde_json::from_slice(text).map_err(|e| json_error("counts", e))?;
    let width =
        counts_width(&raw.counts).map_err(|e| QlabError::parse("counts keys", e.to_string()))?;
    if width == Some(0) {
        return Err(QlabError::parse("counts keys", "empty outcome label"));
    }
    let total = raw
        .counts
        .values()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or_else(|| QlabError::parse("counts", "total overflows"))?;
    if total != raw.shots {
        return Err(QlabError::parse(
            "counts",
            format!("counts sum to {total} but shots is {}", raw.shots),
        ));
    }
    Ok(Counts {
        shots: raw.shots,
        counts: raw.counts,
    })
}
