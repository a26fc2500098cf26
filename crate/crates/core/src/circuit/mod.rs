//! Circuit IR and its two execution modes.
//!
//! [`Circuit::run_state`] evolves `|0…0⟩` exactly and is the reference for
//! everything probabilistic. [`Circuit::run_shots`] samples terminal
//! measurements, optionally with stochastic noise trajectories.

mod format;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::dense::{self, DenseMatrix};
use crate::error::{QlabError, Result};
use crate::gate::{gate_unitary, Gate};
use crate::noise::{self, NoiseModel};
use crate::seeded_rng;
use crate::state::{
    check_qubit_count, check_qubit_list, extract_bits, format_label, parse_label, Sampler,
    SparseState,
};

pub use format::{parse_circuit, parse_counts};

/// Largest register a [`PermutationOp`] may act on; its table has `2^k` entries.
pub const MAX_PERMUTATION_QUBITS: usize = 20;

const PHASE_TOLERANCE: f64 = 1e-9;

/// A bijection on the basis values of a sub-register, with optional phases.
///
/// Register value `v` (bit `i` taken from qubit `register[i]`) is sent to
/// `map[v]` and multiplied by `phases[v]`. Used for classical oracles such as
/// modular multiplication, and with the identity map for diagonal phase
/// oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOp {
    name: String,
    register: Vec<usize>,
    map: Vec<u64>,
    phases: Option<Vec<Complex64>>,
}

impl PermutationOp {
    /// Validate `map` as a bijection on `{0,1}^register.len()`.
    pub fn new(name: impl Into<String>, register: Vec<usize>, map: Vec<u64>) -> Result<Self> {
        let k = register.len();
        if k == 0 {
            return Err(QlabError::input("permutation register is empty"));
        }
        if k > MAX_PERMUTATION_QUBITS {
            return Err(QlabError::Capacity {
                what: "permutation register width",
                requested: k,
                limit: MAX_PERMUTATION_QUBITS,
            });
        }
        check_qubit_list(&register, usize::MAX)?;
        let size = 1usize << k;
        if map.len() != size {
            return Err(QlabError::input(format!(
                "permutation on {k} qubits needs {size} entries, got {}",
                map.len()
            )));
        }
        let mut seen = vec![false; size];
        for &image in &map {
            let slot = seen
                .get_mut(image as usize)
                .filter(|_| image < size as u64)
                .ok_or_else(|| {
                    QlabError::input(format!("permutation image {image} out of range"))
                })?;
            if *slot {
                return Err(QlabError::input(format!(
                    "permutation is not a bijection: {image} hit twice"
                )));
            }
            *slot = true;
        }
        Ok(PermutationOp {
            name: name.into(),
            register,
            map,
            phases: None,
        })
    }

    /// Build the table from a function on register values.
    pub fn from_fn(
        name: impl Into<String>,
        register: Vec<usize>,
        f: impl Fn(u64) -> u64,
    ) -> Result<Self> {
        if register.len() > MAX_PERMUTATION_QUBITS {
            return Err(QlabError::Capacity {
                what: "permutation register width",
                requested: register.len(),
                limit: MAX_PERMUTATION_QUBITS,
            });
        }
        let map = (0..1u64 << register.len()).map(f).collect();
        Self::new(name, register, map)
    }

    /// Identity relabeling with a unit-modulus phase per register value.
    pub fn diagonal(
        name: impl Into<String>,
        register: Vec<usize>,
        phases: Vec<Complex64>,
    ) -> Result<Self> {
        Self::from_fn(name, register, |v| v)?.with_phases(phases)
    }

    /// Attach per-value phases (indexed by the input value).
    pub fn with_phases(mut self, phases: Vec<Complex64>) -> Result<Self> {
        if phases.len() != self.map.len() {
            return Err(QlabError::input(format!(
                "permutation needs {} phases, got {}",
                self.map.len(),
                phases.len()
            )));
        }
        if let Some(p) = phases
            .iter()
            .find(|p| (p.norm() - 1.0).abs() > PHASE_TOLERANCE)
        {
            return Err(QlabError::input(format!(
                "phase {p} does not have unit modulus"
            )));
        }
        self.phases = Some(phases);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn register(&self) -> &[usize] {
        &self.register
    }

    pub fn map(&self) -> &[u64] {
        &self.map
    }

    pub fn phases(&self) -> Option<&[Complex64]> {
        self.phases.as_deref()
    }

    pub fn inverse(&self) -> PermutationOp {
        let mut map = vec![0u64; self.map.len()];
        for (v, &image) in self.map.iter().enumerate() {
            map[image as usize] = v as u64;
        }
        let phases = self
            .phases
            .as_ref()
            .map(|p| map.iter().map(|&pre| p[pre as usize].conj()).collect());
        PermutationOp {
            name: format!("{}_inv", self.name),
            register: self.register.clone(),
            map,
            phases,
        }
    }

    fn unitary(&self, n: usize) -> DenseMatrix {
        let dim = 1usize << n;
        let mut u = DenseMatrix::zeros(dim, dim);
        let reg_mask = self.register.iter().fold(0u64, |m, &q| m | (1 << q));
        for col in 0..dim as u64 {
            let value = extract_bits(col, &self.register) as usize;
            let image = self.map[value];
            let mut row = col & !reg_mask;
            for (i, &q) in self.register.iter().enumerate() {
                row |= ((image >> i) & 1) << q;
            }
            let phase = self
                .phases
                .as_ref()
                .map_or(Complex64::new(1.0, 0.0), |p| p[value]);
            u[(row as usize, col as usize)] = phase;
        }
        u
    }
}

/// One step of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Gate(Gate),
    /// Terminal measurement of the listed qubits.
    Measure(Vec<usize>),
    Permutation(PermutationOp),
}

impl CircuitOp {
    fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitOp::Gate(g) => g.qubits().collect(),
            CircuitOp::Measure(q) => q.clone(),
            CircuitOp::Permutation(p) => p.register.clone(),
        }
    }
}

impl From<Gate> for CircuitOp {
    fn from(g: Gate) -> Self {
        CircuitOp::Gate(g)
    }
}

impl From<PermutationOp> for CircuitOp {
    fn from(p: PermutationOp) -> Self {
        CircuitOp::Permutation(p)
    }
}

/// A qubit count and an ordered list of operations.
///
/// Invariants, enforced by [`Circuit::append`]: every index is in range, and
/// a measured qubit is never touched again (measurement is terminal).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<CircuitOp>,
}

/// Measurement tallies keyed by measured-bit label.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Counts {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    /// Tally map with `shots` set to its total.
    pub fn from_map(counts: BTreeMap<String, u64>) -> Self {
        Counts {
            shots: counts.values().sum(),
            counts,
        }
    }

    /// Empirical frequency of every observed key.
    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        let total = self.shots.max(1) as f64;
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / total))
            .collect()
    }

    pub fn get(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    /// JSON document `{"shots": …, "counts": {…}}` with sorted keys.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("counts serialize")
    }

    /// Width of the keys; `None` when there are no keys.
    pub fn width(&self) -> Option<usize> {
        self.counts.keys().next().map(String::len)
    }
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        Ok(Circuit {
            num_qubits,
            ops: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    /// Append `op` after validating it against the circuit.
    pub fn append(&mut self, op: impl Into<CircuitOp>) -> Result<&mut Self> {
        let op = op.into();
        let qubits = op.qubits();
        match &op {
            CircuitOp::Gate(g) => g.check_bounds(self.num_qubits)?,
            CircuitOp::Measure(q) if q.is_empty() => {
                return Err(QlabError::input("measurement needs at least one qubit"))
            }
            _ => check_qubit_list(&qubits, self.num_qubits)?,
        }
        let measured = self.measured_qubits();
        if let Some(q) = qubits.iter().find(|q| measured.contains(q)) {
            return Err(QlabError::input(format!(
                "qubit {q} was already measured; measurement is terminal"
            )));
        }
        self.ops.push(op);
        Ok(self)
    }

    /// Append terminal measurements of `qubits`.
    pub fn measure(&mut self, qubits: &[usize]) -> Result<&mut Self> {
        self.append(CircuitOp::Measure(qubits.to_vec()))
    }

    /// Append every op in order, stopping at the first invalid one.
    pub fn extend<I, O>(&mut self, ops: I) -> Result<&mut Self>
    where
        I: IntoIterator<Item = O>,
        O: Into<CircuitOp>,
    {
        for op in ops {
            self.append(op)?;
        }
        Ok(self)
    }

    /// Sorted union of all measured qubits.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .ops
            .iter()
            .filter_map(|op| match op {
                CircuitOp::Measure(q) => Some(q.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect();
        out.sort_unstable();
        out
    }

    pub fn has_measurement(&self) -> bool {
        self.ops
            .iter()
            .any(|op| matches!(op, CircuitOp::Measure(_)))
    }

    /// Copy with every measurement removed.
    pub fn without_measurements(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self
                .ops
                .iter()
                .filter(|op| !matches!(op, CircuitOp::Measure(_)))
                .cloned()
                .collect(),
        }
    }

    /// The adjoint circuit. Fails if the circuit measures.
    pub fn inverse(&self) -> Result<Circuit> {
        self.require_unitary("inverse")?;
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| match op {
                CircuitOp::Gate(g) => CircuitOp::Gate(g.inverse()),
                CircuitOp::Permutation(p) => CircuitOp::Permutation(p.inverse()),
                CircuitOp::Measure(_) => unreachable!(),
            })
            .collect();
        Ok(Circuit {
            num_qubits: self.num_qubits,
            ops,
        })
    }

    fn require_unitary(&self, what: &str) -> Result<()> {
        if self.has_measurement() {
            return Err(QlabError::Mode(format!(
                "{what} needs a circuit without measurements"
            )));
        }
        Ok(())
    }

    /// Apply the non-measurement ops to `state`.
    pub fn evolve(&self, state: &SparseState) -> Result<SparseState> {
        if state.num_qubits() != self.num_qubits {
            return Err(QlabError::input(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        let mut state = state.clone();
        for op in &self.ops {
            state = apply_op(&state, op)?;
        }
        Ok(state)
    }

    /// Exact final state from `|0…0⟩`.
    pub fn run_state(&self) -> Result<SparseState> {
        self.require_unitary("exact state evaluation")?;
        self.evolve(&SparseState::zero(self.num_qubits)?)
    }

    /// Sample `shots` executions; keys hold the measured bits only.
    ///
    /// Without noise (or with an empty model) the final state is computed once
    /// and sampled with a generator seeded by `seed`. With noise every shot
    /// runs its own trajectory on an independent stream of the same seed, so
    /// results do not depend on thread scheduling.
    pub fn run_shots(&self, shots: u64, seed: u64, noise: Option<&NoiseModel>) -> Result<Counts> {
        if shots == 0 {
            return Err(QlabError::input("shots must be at least 1"));
        }
        let measured = self.measured_qubits();
        if measured.is_empty() {
            return Err(QlabError::Mode(
                "shot mode needs at least one measurement".into(),
            ));
        }
        let width = measured.len();
        let tally: BTreeMap<u64, u64> = match noise.filter(|m| !m.is_empty()) {
            None => {
                let state = self.without_measurements().run_state()?;
                let sampler = Sampler::new(state.marginal(&measured));
                let mut rng = seeded_rng(seed);
                let mut tally = BTreeMap::new();
                for _ in 0..shots {
                    *tally.entry(sampler.draw(&mut rng)).or_insert(0) += 1;
                }
                tally
            }
            Some(model) => {
                let hook = noise::apply_noise_model(self, model)?;
                let start = SparseState::zero(self.num_qubits)?;
                (0..shots)
                    .into_par_iter()
                    .map(|shot| {
                        let mut rng = seeded_rng(seed);
                        rng.set_stream(shot);
                        self.trajectory(&start, &hook, &measured, &mut rng)
                    })
                    .try_fold(BTreeMap::new, |mut acc, outcome| {
                        *acc.entry(outcome?).or_insert(0u64) += 1;
                        Ok::<_, QlabError>(acc)
                    })
                    .try_reduce(BTreeMap::new, |mut a, b| {
                        for (k, v) in b {
                            *a.entry(k).or_insert(0) += v;
                        }
                        Ok(a)
                    })?
            }
        };
        Ok(Counts::from_map(
            tally
                .into_iter()
                .map(|(k, c)| (format_label(k, width), c))
                .collect(),
        ))
    }

    fn trajectory<R: Rng + ?Sized>(
        &self,
        start: &SparseState,
        hook: &noise::NoiseHook,
        measured: &[usize],
        rng: &mut R,
    ) -> Result<u64> {
        let mut state = start.clone();
        for (i, op) in self.ops.iter().enumerate() {
            state = apply_op(&state, op)?;
            for &(qubit, channel) in hook.insertions(i) {
                state = noise::trajectory_step(&state, channel, qubit, rng)?;
            }
        }
        let sampler = Sampler::new(state.marginal(measured));
        let mut bits = sampler.draw(rng);
        for i in 0..measured.len() {
            if hook.readout_flip() > 0.0 && rng.gen::<f64>() < hook.readout_flip() {
                bits ^= 1 << i;
            }
        }
        Ok(bits)
    }

    /// Ordered product of the op unitaries (last op leftmost).
    pub fn unitary(&self) -> Result<DenseMatrix> {
        dense::check_unitary_size(self.num_qubits)?;
        self.require_unitary("unitary construction")?;
        let mut u = dense::identity(1 << self.num_qubits);
        for op in &self.ops {
            let m = match op {
                CircuitOp::Gate(g) => gate_unitary(g, self.num_qubits)?,
                CircuitOp::Permutation(p) => p.unitary(self.num_qubits),
                CircuitOp::Measure(_) => unreachable!(),
            };
            u = m * u;
        }
        Ok(u)
    }

    /// Serialize to the circuit JSON format.
    pub fn to_json(&self) -> String {
        format::serialize_circuit(self)
    }
}

fn apply_op(state: &SparseState, op: &CircuitOp) -> Result<SparseState> {
    match op {
        CircuitOp::Gate(g) => state.apply_gate(g),
        CircuitOp::Permutation(p) => Ok(state.apply_relabel(&p.register, &p.map, p.phases())),
        CircuitOp::Measure(_) => Ok(state.clone()),
    }
}

/// Check that every key is a bitstring of one common width and return it.
pub(crate) fn counts_width(counts: &BTreeMap<String, u64>) -> Result<Option<usize>> {
    let mut width = None;
    for key in counts.keys() {
        let w = key.len();
        parse_label(key, w)?;
        match width {
            None => width = Some(w),
            Some(prev) if prev != w => {
                return Err(QlabError::input(format!(
                    "outcome {key:?} has width {w}, others have {prev}"
                )))
            }
            _ => {}
        }
    }
    Ok(width)
}
