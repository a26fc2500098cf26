//! Stochastic noise channels, unraveled into pure-state trajectories.
//!
//! A channel never turns the state into a mixture. Each call to
//! [`trajectory_step`] picks one Kraus branch at random and applies it, so a
//! mixed-state result is recovered by averaging over shots.
//!
//! Channel parameterizations:
//!
//! | kind                | branches                                             |
//! |---------------------|------------------------------------------------------|
//! | `bit_flip`          | `X` with probability `p`, else `I`                   |
//! | `phase_flip`        | `Z` with probability `p`, else `I`                   |
//! | `depolarizing`      | `X`, `Y`, `Z` each with probability `p/3`, else `I`  |
//! | `amplitude_damping` | `K₀ = diag(1, √(1−γ))`, `K₁ = √γ·|0⟩⟨1|`             |
//!
//! With the depolarizing convention above, `p = 3/4` is the fully
//! depolarizing channel (each of `I, X, Y, Z` with probability 1/4).
//!
//! Noise file format:
//!
//! ```text
//! {"after_gate": [{"gate": "all" | name, "qubits": "all" | [int],
//!                  "kind": "bit_flip" | "phase_flip" | "depolarizing" | "amplitude_damping",
//!                  "strength": float}],
//!  "readout_flip": float}
//! ```

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitOp};
use crate::error::{QlabError, Result};
use crate::gate::{Gate, GateKind};
use crate::state::{AmplitudeMap, SparseState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    Depolarizing,
    AmplitudeDamping,
}

/// A single-qubit channel with its probability (or damping rate) in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    kind: ChannelKind,
    strength: f64,
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QlabError::input(format!("{what} {p} is outside [0, 1]")));
    }
    Ok(())
}

impl Channel {
    pub fn new(kind: ChannelKind, strength: f64) -> Result<Self> {
        check_probability("channel strength", strength)?;
        Ok(Channel { kind, strength })
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::new(ChannelKind::BitFlip, p)
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::new(ChannelKind::PhaseFlip, p)
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(ChannelKind::Depolarizing, p)
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        Self::new(ChannelKind::AmplitudeDamping, gamma)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }
}

/// Which branch a trajectory step took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Identity,
    X,
    Y,
    Z,
    /// Amplitude damping: no decay (`K₀`).
    NoDecay,
    /// Amplitude damping: decay `|1⟩ → |0⟩` (`K₁`).
    Decay,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Draw the Pauli branch of a state-independent channel. Amplitude damping
/// depends on the state and is handled by [`trajectory_step_traced`].
fn pauli_branch<R: Rng + ?Sized>(channel: Channel, rng: &mut R) -> Branch {
    let u = rng.gen::<f64>();
    if u >= channel.strength {
        return Branch::Identity;
    }
    match channel.kind {
        ChannelKind::BitFlip => Branch::X,
        ChannelKind::PhaseFlip => Branch::Z,
        ChannelKind::Depolarizing => match ((u / channel.strength) * 3.0) as usize {
            0 => Branch::X,
            1 => Branch::Y,
            _ => Branch::Z,
        },
        ChannelKind::AmplitudeDamping => unreachable!("state-dependent channel"),
    }
}

/// Apply one randomly drawn branch of `channel` to `qubit`.
pub fn trajectory_step<R: Rng + ?Sized>(
    state: &SparseState,
    channel: Channel,
    qubit: usize,
    rng: &mut R,
) -> Result<SparseState> {
    trajectory_step_traced(state, channel, qubit, rng).map(|(s, _)| s)
}

/// [`trajectory_step`], also reporting which branch was taken.
pub fn trajectory_step_traced<R: Rng + ?Sized>(
    state: &SparseState,
    channel: Channel,
    qubit: usize,
    rng: &mut R,
) -> Result<(SparseState, Branch)> {
    if qubit >= state.num_qubits() {
        return Err(QlabError::input(format!(
            "noise on qubit {qubit}, out of range for {} qubits",
            state.num_qubits()
        )));
    }
    if channel.kind == ChannelKind::AmplitudeDamping {
        return damping_step(state, channel.strength, qubit, rng);
    }
    let branch = pauli_branch(channel, rng);
    let gate = match branch {
        Branch::X => Gate::x(qubit),
        Branch::Y => Gate::y(qubit),
        Branch::Z => Gate::z(qubit),
        _ => return Ok((state.clone(), branch)),
    };
    Ok((state.apply_gate(&gate)?, branch))
}

fn damping_step<R: Rng + ?Sized>(
    state: &SparseState,
    gamma: f64,
    qubit: usize,
    rng: &mut R,
) -> Result<(SparseState, Branch)> {
    let bit = 1u64 << qubit;
    let excited: f64 = state
        .entries()
        .iter()
        .filter(|(k, _)| k & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    // ⟨ψ|K₁†K₁|ψ⟩ = γ·P(qubit = 1)
    let p_decay = gamma * excited;
    let u = rng.gen::<f64>();
    if gamma == 0.0 {
        return Ok((state.clone(), Branch::NoDecay));
    }
    let mut out = AmplitudeMap::default();
    let branch = if u < p_decay {
        let scale = gamma.sqrt();
        for (&k, &a) in state.map() {
            if k & bit != 0 {
                out.insert(k & !bit, a * scale);
            }
        }
        Branch::Decay
    } else {
        let scale = (1.0 - gamma).sqrt();
        for (&k, &a) in state.map() {
            out.insert(k, if k & bit != 0 { a * scale } else { a });
        }
        Branch::NoDecay
    };
    let next = SparseState::from_map(state.num_qubits(), out).normalized()?;
    Ok((next, branch))
}

/// Gate-kind selector of a noise rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateFilter {
    All,
    Kind(GateKind),
}

/// Qubit selector of a noise rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QubitFilter {
    All,
    Only(Vec<usize>),
}

impl QubitFilter {
    fn matches(&self, q: usize) -> bool {
        match self {
            QubitFilter::All => true,
            QubitFilter::Only(list) => list.contains(&q),
        }
    }
}

/// "After every gate matching `gate`, apply `channel` to each of its target
/// qubits that matches `qubits`."
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRule {
    pub gate: GateFilter,
    pub qubits: QubitFilter,
    pub channel: Channel,
}

/// Gate-attached channels plus an independent per-bit readout flip.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    after_gate: Vec<NoiseRule>,
    readout_flip: f64,
}

impl NoiseModel {
    pub fn new(after_gate: Vec<NoiseRule>, readout_flip: f64) -> Result<Self> {
        check_probability("readout flip probability", readout_flip)?;
        Ok(NoiseModel {
            after_gate,
            readout_flip,
        })
    }

    /// One channel after every gate on every target qubit.
    pub fn uniform(channel: Channel) -> Self {
        NoiseModel {
            after_gate: vec![NoiseRule {
                gate: GateFilter::All,
                qubits: QubitFilter::All,
                channel,
            }],
            readout_flip: 0.0,
        }
    }

    /// Only readout errors.
    pub fn readout(flip: f64) -> Result<Self> {
        Self::new(Vec::new(), flip)
    }

    pub fn rules(&self) -> &[NoiseRule] {
        &self.after_gate
    }

    pub fn readout_flip(&self) -> f64 {
        self.readout_flip
    }

    /// No channels and no readout error.
    pub fn is_empty(&self) -> bool {
        self.after_gate.is_empty() && self.readout_flip == 0.0
    }

    /// Parse the noise file format.
    pub fn parse(text: &[u8]) -> Result<Self> {
        let raw: RawModel = serde_json::from_slice(text).map_err(|e| {
            QlabError::parse(
                format!("noise line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let mut rules = Vec::with_capacity(raw.after_gate.len());
        for (i, r) in raw.after_gate.into_iter().enumerate() {
            let ctx = || format!("noise after_gate[{i}]");
            let gate = match r.gate.as_str() {
                "all" => GateFilter::All,
                name => GateFilter::Kind(
                    name.parse()
                        .map_err(|e: QlabError| QlabError::parse(ctx(), e.to_string()))?,
                ),
            };
            let qubits = match r.qubits {
                RawQubits::Keyword(k) if k == "all" => QubitFilter::All,
                RawQubits::Keyword(k) => {
                    return Err(QlabError::parse(
                        ctx(),
                        format!("qubits must be \"all\" or a list, got {k:?}"),
                    ))
                }
                RawQubits::List(l) => QubitFilter::Only(l),
            };
            let channel = Channel::new(r.kind, r.strength)
                .map_err(|e| QlabError::parse(ctx(), e.to_string()))?;
            rules.push(NoiseRule {
                gate,
                qubits,
                channel,
            });
        }
        Self::new(rules, raw.readout_flip)
            .map_err(|e| QlabError::parse("noise readout_flip", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let raw = RawModel {
            after_gate: self
                .after_gate
                .iter()
                .map(|r| RawRule {
                    gate: match r.gate {
                        GateFilter::All => "all".into(),
                        GateFilter::Kind(k) => k.name().into(),
                    },
                    qubits: match &r.qubits {
                        QubitFilter::All => RawQubits::Keyword("all".into()),
                        QubitFilter::Only(l) => RawQubits::List(l.clone()),
                    },
                    kind: r.channel.kind,
                    strength: r.channel.strength,
                })
                .collect(),
            readout_flip: self.readout_flip,
        };
        serde_json::to_string(&raw).expect("noise serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    after_gate: Vec<RawRule>,
    #[serde(default)]
    readout_flip: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    gate: String,
    qubits: RawQubits,
    kind: ChannelKind,
    strength: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawQubits {
    Keyword(String),
    List(Vec<usize>),
}

/// Noise insertion schedule for one circuit: which channels follow which op.
#[derive(Debug, Clone)]
pub struct NoiseHook {
    per_op: Vec<Vec<(usize, Channel)>>,
    readout_flip: f64,
}

impl NoiseHook {
    /// `(qubit, channel)` steps to run after op `index`.
    pub fn insertions(&self, index: usize) -> &[(usize, Channel)] {
        self.per_op.get(index).map_or(&[], Vec::as_slice)
    }

    pub fn readout_flip(&self) -> f64 {
        self.readout_flip
    }
}

/// Resolve `model` against `circuit`'s gates. Only gate ops receive noise;
/// oracle permutations and measurements are ideal. Controls are never hit.
pub fn apply_noise_model(circuit: &Circuit, model: &NoiseModel) -> Result<NoiseHook> {
    let per_op = circuit
        .ops()
        .iter()
        .map(|op| {
            let CircuitOp::Gate(g) = op else {
                return Vec::new();
            };
            let mut steps = Vec::new();
            for rule in &model.after_gate {
                let kind_ok = match rule.gate {
                    GateFilter::All => true,
                    GateFilter::Kind(k) => k == g.kind(),
                };
                if !kind_ok {
                    continue;
                }
                for &t in g.targets() {
                    if rule.qubits.matches(t) {
                        steps.push((t, rule.channel));
                    }
                }
            }
            steps
        })
        .collect();
    Ok(NoiseHook {
        per_op,
        readout_flip: model.readout_flip,
    })
}

/// First-order survival estimate `(1 − p)^gate_count` of an ideal outcome
/// under per-gate depolarizing noise.
pub fn depolarizing_fidelity_estimate(p: f64, gate_count: u32) -> Result<f64> {
    check_probability("depolarizing probability", p)?;
    Ok((1.0 - p).powi(gate_count as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use std::collections::BTreeMap;

    fn one() -> SparseState {
        SparseState::basis_state(1, "1").unwrap()
    }

    #[test]
    fn certain_bit_flip() {
        let zero = SparseState::basis_state(1, "0").unwrap();
        let mut rng = seeded_rng(0);
        for _ in 0..50 {
            let out = trajectory_step(&zero, Channel::bit_flip(1.0).unwrap(), 0, &mut rng).unwrap();
            assert_eq!(out, one());
        }
    }

    #[test]
    fn zero_strength_is_identity() {
        let state = SparseState::from_dense(&[
            num_complex::Complex64::new(0.6, 0.0),
            num_complex::Complex64::new(0.0, 0.8),
        ])
        .unwrap();
        let mut rng = seeded_rng(5);
        for kind in [
            ChannelKind::BitFlip,
            ChannelKind::PhaseFlip,
            ChannelKind::Depolarizing,
            ChannelKind::AmplitudeDamping,
        ] {
            for _ in 0..20 {
                let out =
                    trajectory_step(&state, Channel::new(kind, 0.0).unwrap(), 0, &mut rng).unwrap();
                assert_eq!(out, state, "{kind:?}");
            }
        }
    }

    #[test]
    fn damping_decay_frequency() {
        let mut rng = seeded_rng(77);
        let ch = Channel::amplitude_damping(0.3).unwrap();
        let trials = 10_000;
        let decays = (0..trials)
            .filter(|_| {
                let out = trajectory_step(&one(), ch, 0, &mut rng).unwrap();
                out.labeled().contains_key("0")
            })
            .count();
        let frac = decays as f64 / trials as f64;
        assert!((frac - 0.3).abs() <= 0.01, "{frac}");
    }

    #[test]
    fn outputs_stay_normalized() {
        let mut rng = seeded_rng(8);
        let start = SparseState::zero(3)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap()
            .apply_gate(&Gate::ry(1, 1.1))
            .unwrap()
            .apply_gate(&Gate::cnot(1, 2))
            .unwrap();
        let mut state = start;
        for i in 0..500 {
            let kind = [
                ChannelKind::BitFlip,
                ChannelKind::PhaseFlip,
                ChannelKind::Depolarizing,
                ChannelKind::AmplitudeDamping,
            ][i % 4];
            let ch = Channel::new(kind, rng.gen_range(0.0..=1.0)).unwrap();
            state = trajectory_step(&state, ch, i % 3, &mut rng).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
            state = state.apply_gate(&Gate::h(i % 3)).unwrap();
        }
    }

    fn branch_freqs(p: f64, draws: usize) -> BTreeMap<Branch, f64> {
        let mut rng = seeded_rng(31);
        let ch = Channel::depolarizing(p).unwrap();
        let zero = SparseState::zero(1).unwrap();
        let mut tally = BTreeMap::new();
        for _ in 0..draws {
            let (_, b) = trajectory_step_traced(&zero, ch, 0, &mut rng).unwrap();
            *tally.entry(b).or_insert(0.0) += 1.0 / draws as f64;
        }
        tally
    }

    #[test]
    fn depolarizing_full_strength_splits_over_paulis() {
        let f = branch_freqs(1.0, 10_000);
        assert!(!f.contains_key(&Branch::Identity));
        for b in [Branch::X, Branch::Y, Branch::Z] {
            assert!((f[&b] - 1.0 / 3.0).abs() <= 0.015, "{b}: {}", f[&b]);
        }
    }

    #[test]
    fn depolarizing_three_quarters_is_uniform_over_four() {
        let f = branch_freqs(0.75, 10_000);
        for b in [Branch::Identity, Branch::X, Branch::Y, Branch::Z] {
            assert!((f[&b] - 0.25).abs() <= 0.01, "{b}: {}", f[&b]);
        }
    }

    #[test]
    fn strengths_validated() {
        assert!(Channel::bit_flip(1.5).is_err());
        assert!(Channel::amplitude_damping(-0.1).is_err());
        assert!(NoiseModel::readout(2.0).is_err());
        assert!(trajectory_step(
            &one(),
            Channel::bit_flip(0.5).unwrap(),
            3,
            &mut seeded_rng(0)
        )
        .is_err());
    }

    #[test]
    fn fidelity_estimate() {
        assert_eq!(depolarizing_fidelity_estimate(0.0, 10).unwrap(), 1.0);
        assert!((depolarizing_fidelity_estimate(0.01, 1).unwrap() - 0.99).abs() < 1e-15);
        assert!((depolarizing_fidelity_estimate(0.01, 100).unwrap() - 0.3660).abs() < 1e-4);
        assert!(depolarizing_fidelity_estimate(1.2, 3).is_err());
    }

    #[test]
    fn parse_noise_file() {
        let text = br#"{"after_gate":[{"gate":"all","qubits":"all","kind":"bit_flip","strength":0.1},
            {"gate":"h","qubits":[0,2],"kind":"amplitude_damping","strength":0.25}],"readout_flip":0.02}"#;
        let m = NoiseModel::parse(text).unwrap();
        assert_eq!(m.rules().len(), 2);
        assert_eq!(m.rules()[1].gate, GateFilter::Kind(GateKind::H));
        assert_eq!(m.rules()[1].qubits, QubitFilter::Only(vec![0, 2]));
        assert_eq!(m.readout_flip(), 0.02);
        assert_eq!(NoiseModel::parse(m.to_json().as_bytes()).unwrap(), m);

        for bad in [
            &br#"{"after_gate":[{"gate":"nope","qubits":"all","kind":"bit_flip","strength":0.1}]}"#
                [..],
            br#"{"after_gate":[{"gate":"x","qubits":"some","kind":"bit_flip","strength":0.1}]}"#,
            br#"{"after_gate":[{"gate":"x","qubits":"all","kind":"melt","strength":0.1}]}"#,
            br#"{"after_gate":[{"gate":"x","qubits":"all","kind":"bit_flip","strength":3}]}"#,
            br#"{"readout_flip":-1}"#,
            br#"{"readout_flip":0.1,"extra":1}"#,
            b"",
        ] {
            assert!(matches!(
                NoiseModel::parse(bad),
                Err(QlabError::Parse { .. })
            ));
        }
    }

    #[test]
    fn hook_targets_only() {
        let mut c = Circuit::new(3).unwrap();
        c.append(Gate::h(0)).unwrap();
        c.append(Gate::cnot(0, 1)).unwrap();
        c.append(Gate::swap(1, 2)).unwrap();
        let model = NoiseModel::new(
            vec![
                NoiseRule {
                    gate: GateFilter::All,
                    qubits: QubitFilter::All,
                    channel: Channel::bit_flip(0.1).unwrap(),
                },
                NoiseRule {
                    gate: GateFilter::Kind(GateKind::H),
                    qubits: QubitFilter::Only(vec![1]),
                    channel: Channel::phase_flip(0.2).unwrap(),
                },
            ],
            0.0,
        )
        .unwrap();
        let hook = apply_noise_model(&c, &model).unwrap();
        assert_eq!(hook.insertions(0).len(), 1);
        assert_eq!(
            hook.insertions(1).iter().map(|s| s.0).collect::<Vec<_>>(),
            [1]
        );
        assert_eq!(
            hook.insertions(2).iter().map(|s| s.0).collect::<Vec<_>>(),
            [1, 2]
        );
        assert!(hook.insertions(9).is_empty());
    }
}
